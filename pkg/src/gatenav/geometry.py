"""Reference frames, rotations, and the pinhole camera model.

Conventions used across the whole package (single source of truth):

* World frame: right-handed, z up.  Gravity acts along -z.
* Body frame: x forward, y left, z up (thrust acts along body +z).
* Camera frame: x right, y down, z forward along the optical axis.
* Quaternions are stored as ``[w, x, y, z]`` and rotate body-frame vectors
  into the world frame (world <- body).
* Normalized image coordinates live in [-1, 1]^2 with x pointing right and
  y pointing down.  They are tangent ratios::

      x = tan(azimuth) / tan(hfov / 2)
      y = tan(elevation) / tan(vfov / 2)

  so x = +/-1 on the horizontal field-of-view boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

_QUAT_NORM_TOL = 1e-9


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected 3-vector, got shape {a.shape}")
    return a


def _quat(q) -> np.ndarray:
    a = np.asarray(q, dtype=float)
    if a.shape != (4,):
        raise ValueError(f"expected quaternion [w,x,y,z], got shape {a.shape}")
    return a


# ---------------------------------------------------------------------------
# quaternion helpers
# ---------------------------------------------------------------------------

def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q) -> np.ndarray:
    q = _quat(q)
    n = np.linalg.norm(q)
    if n == 0.0:
        raise ValueError("cannot normalize zero quaternion")
    return q / n


def quat_mul(a, b) -> np.ndarray:
    aw, ax, ay, az = _quat(a)
    bw, bx, by, bz = _quat(b)
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q) -> np.ndarray:
    q = _quat(q)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector ``v`` by quaternion ``q`` (body -> world for a pose)."""
    return quat_to_rot(q) @ _vec3(v)


def quat_to_rot(q) -> np.ndarray:
    w, x, y, z = quat_normalize(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rot_to_quat(rot: np.ndarray) -> np.ndarray:
    """Shepperd's method, numerically stable for all rotations."""
    r = np.asarray(rot, dtype=float)
    t = np.trace(r)
    if t > 0:
        s = np.sqrt(t + 1.0) * 2
        q = np.array([0.25 * s,
                      (r[2, 1] - r[1, 2]) / s,
                      (r[0, 2] - r[2, 0]) / s,
                      (r[1, 0] - r[0, 1]) / s])
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2
        q = np.array([(r[2, 1] - r[1, 2]) / s,
                      0.25 * s,
                      (r[0, 1] + r[1, 0]) / s,
                      (r[0, 2] + r[2, 0]) / s])
    elif r[1, 1] >= r[2, 2]:
        s = np.sqrt(1.0 - r[0, 0] + r[1, 1] - r[2, 2]) * 2
        q = np.array([(r[0, 2] - r[2, 0]) / s,
                      (r[0, 1] + r[1, 0]) / s,
                      0.25 * s,
                      (r[1, 2] + r[2, 1]) / s])
    else:
        s = np.sqrt(1.0 - r[0, 0] - r[1, 1] + r[2, 2]) * 2
        q = np.array([(r[1, 0] - r[0, 1]) / s,
                      (r[0, 2] + r[2, 0]) / s,
                      (r[1, 2] + r[2, 1]) / s,
                      0.25 * s])
    if q[0] < 0:
        q = -q
    return quat_normalize(q)


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = _vec3(axis)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise ValueError("zero rotation axis")
    half = 0.5 * angle
    return np.concatenate([[np.cos(half)], np.sin(half) * axis / n])


def quat_from_euler_zyx(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Compose R = Rz(yaw) @ Ry(pitch) @ Rx(roll) as a quaternion."""
    qz = quat_from_axis_angle([0, 0, 1], yaw)
    qy = quat_from_axis_angle([0, 1, 0], pitch)
    qx = quat_from_axis_angle([1, 0, 0], roll)
    return quat_mul(quat_mul(qz, qy), qx)


def euler_zyx(orientation) -> np.ndarray:
    """Yaw/pitch/roll (radians) of a unit quaternion, ZYX convention.

    yaw in (-pi, pi], pitch in [-pi/2, pi/2], roll in (-pi, pi].  At gimbal
    lock (|pitch| = pi/2) roll is set to 0 by convention and yaw absorbs the
    remaining rotation.
    """
    r = quat_to_rot(orientation)
    sp = np.clip(-r[2, 0], -1.0, 1.0)
    pitch = np.arcsin(sp)
    if abs(sp) < 1.0 - 1e-12:
        yaw = np.arctan2(r[1, 0], r[0, 0])
        roll = np.arctan2(r[2, 1], r[2, 2])
    else:
        yaw = np.arctan2(-r[0, 1], r[1, 1])
        roll = 0.0
    if yaw == -np.pi:
        yaw = np.pi
    if roll == -np.pi:
        roll = np.pi
    return np.array([yaw, pitch, roll])


# ---------------------------------------------------------------------------
# poses and the camera
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pose:
    """Rigid pose: position in the world frame plus a world<-body quaternion."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _vec3(self.position))
        q = _quat(self.orientation)
        if abs(np.linalg.norm(q) - 1.0) > _QUAT_NORM_TOL:
            raise ValueError("orientation quaternion is not unit norm")
        object.__setattr__(self, "orientation", q)

    @property
    def rotation(self) -> np.ndarray:
        return quat_to_rot(self.orientation)


def _forward_mount() -> np.ndarray:
    # Columns are the camera axes expressed in the body frame: camera x
    # (image right) = -body y, camera y (image down) = -body z, camera z
    # (optical axis) = +body x.
    return np.array([
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ])


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera rigidly mounted on the body.

    ``mount_rotation`` maps camera-frame vectors into the body frame and
    ``mount_translation`` is the camera origin in body coordinates.  The
    default is a forward-facing camera at the body origin with zero tilt.
    """

    horizontal_fov: float = np.deg2rad(90.0)
    aspect: float = 4.0 / 3.0
    mount_rotation: np.ndarray = field(default_factory=_forward_mount)
    mount_translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not 0.0 < self.horizontal_fov < np.pi:
            raise ValueError("horizontal_fov must be in (0, pi)")
        if self.aspect <= 0.0:
            raise ValueError("aspect must be positive")
        r = np.asarray(self.mount_rotation, dtype=float)
        if r.shape != (3, 3) or not np.allclose(r @ r.T, np.eye(3), atol=1e-9):
            raise ValueError("mount_rotation must be a 3x3 rotation matrix")
        object.__setattr__(self, "mount_rotation", r)
        object.__setattr__(self, "mount_translation", _vec3(self.mount_translation))

    @property
    def tan_half_h(self) -> float:
        return np.tan(0.5 * self.horizontal_fov)

    @property
    def tan_half_v(self) -> float:
        # Vertical tangent scale derived from the aspect ratio (width/height).
        return self.tan_half_h / self.aspect


class ImageCoords(NamedTuple):
    """Normalized image coordinates, x right and y down, in [-1, 1]^2."""

    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def clamped(self) -> "ImageCoords":
        return ImageCoords(float(np.clip(self.x, -1.0, 1.0)),
                           float(np.clip(self.y, -1.0, 1.0)))

    @property
    def in_bounds(self) -> bool:
        return abs(self.x) <= 1.0 and abs(self.y) <= 1.0


def camera_origin(drone: Pose, cam: CameraModel) -> np.ndarray:
    return drone.position + drone.rotation @ cam.mount_translation


def world_to_camera(point, drone: Pose, cam: CameraModel) -> np.ndarray:
    p_body = drone.rotation.T @ (_vec3(point) - drone.position)
    return cam.mount_rotation.T @ (p_body - cam.mount_translation)


def project(point, drone: Pose, cam: CameraModel) -> tuple[ImageCoords, bool]:
    """Project a world point to normalized image coordinates.

    Returns the (possibly out-of-frame) coordinates and a visibility flag.
    Visible means the point is strictly in front of the camera and inside
    [-1, 1]^2.  Points at or behind the camera plane get coordinates clamped
    to +/-1 following the sign of the lateral offsets.
    """
    p_cam = world_to_camera(point, drone, cam)
    z = p_cam[2]
    if z <= 0.0:
        return ImageCoords(float(np.sign(p_cam[0])), float(np.sign(p_cam[1]))), False
    x = p_cam[0] / (z * cam.tan_half_h)
    y = p_cam[1] / (z * cam.tan_half_v)
    visible = bool(abs(x) <= 1.0 and abs(y) <= 1.0)
    return ImageCoords(float(x), float(y)), visible


def backproject(coords: ImageCoords, drone: Pose, cam: CameraModel) -> np.ndarray:
    """World-frame unit direction of the camera ray through ``coords``."""
    d_cam = np.array([coords[0] * cam.tan_half_h, coords[1] * cam.tan_half_v, 1.0])
    d_world = drone.rotation @ (cam.mount_rotation @ d_cam)
    return d_world / np.linalg.norm(d_world)


def goal_from_ray(coords: ImageCoords, length: float, drone: Pose,
                  cam: CameraModel) -> np.ndarray:
    """Point at ``length`` meters along the back-projected camera ray."""
    if length < 0.0:
        raise ValueError("ray length must be non-negative")
    return camera_origin(drone, cam) + length * backproject(coords, drone, cam)
