//! Seeded procedural scenes and holonomic kinematics.

mod aabb;
mod kinematics;
mod scene;

pub use aabb::Aabb;
pub use kinematics::{
    probe_depth, segment_collides, step, step_with_radius, DepthProbe, StepOutcome, DEPTH_CAP,
    UAV_RADIUS,
};
pub use scene::{generate_scene, Bounds, Difficulty, GenParams, Obstacle, Scene, SCENE_FORMAT_VERSION};
