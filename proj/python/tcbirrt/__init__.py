"""Task-space bidirectional planning for a dual-arm closed chain."""

from ._tcbirrt import (
    Pose6,
    SceneConfig,
    Transform,
    closed_chain_deviation,
    expcoords_to_rotation,
    forward_kinematics,
    generate_tasks,
    ik_dual,
    in_collision,
    jacobian,
    load_scene,
    plan,
    pose_to_transform,
    rot_x,
    rot_y,
    rot_z,
    rotation_to_expcoords,
    success_rate,
    transform_to_deviation,
    transform_to_pose,
    validate_path_file,
)

__all__ = [
    "Pose6",
    "SceneConfig",
    "Transform",
    "closed_chain_deviation",
    "expcoords_to_rotation",
    "forward_kinematics",
    "generate_tasks",
    "ik_dual",
    "in_collision",
    "jacobian",
    "load_scene",
    "plan",
    "pose_to_transform",
    "rot_x",
    "rot_y",
    "rot_z",
    "rotation_to_expcoords",
    "success_rate",
    "transform_to_deviation",
    "transform_to_pose",
    "validate_path_file",
]
