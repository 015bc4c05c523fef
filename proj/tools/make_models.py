#!/usr/bin/env python3
# Copyright 2026 The absmbd Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled mechanism files in models/.

Global Z is vertical. Every body keeps its local z axis horizontal so the
z-x-z Euler angle formulation stays at theta = pi/2, far from gimbal lock.
"""

import json
import math
import os

import numpy as np

X, Y, Z = np.eye(3)


def unit(v):
    # sqrt of the plain sum of squares keeps complex-step derivatives intact.
    return v / np.sqrt(np.sum(v * v))


def frame(x, y):
    """Rotation matrix with columns x, y, x cross y."""
    x = unit(x)
    y = unit(y - x * np.sum(x * y))
    return np.column_stack([x, y, np.cross(x, y)])


def vec(v):
    return [float(c) for c in np.real(v)]


def body(bid, name, mass, inertia, pose, pose_rate=None):
    """pose(alpha) -> (r, A); pose_rate = d alpha / dt at t = 0."""
    r, a = pose(0.0)
    rdot = np.zeros(3)
    omega = np.zeros(3)
    if pose_rate:
        fn, alpha0, alpha_dot = pose_rate
        step = 1e-30
        rc, ac = fn(alpha0 + 1j * step)
        rdot = np.imag(rc) / step * alpha_dot
        adot = np.imag(ac) / step * alpha_dot
        w = np.real(ac).T @ adot
        omega = np.array([w[2, 1], w[0, 2], w[1, 0]])
    a = np.real(a)
    return {"id": bid, "name": name, "mass": mass, "inertia": inertia,
            "r0": vec(r), "A0": [float(v) for v in a.reshape(-1)],
            "rdot0": vec(rdot), "omega_bar0": vec(omega)}


def pendulum():
    s = math.sqrt(0.5)
    x = np.array([-s, 0.0, -s])
    y = np.array([-s, 0.0, s])
    return {
        "name": "pendulum",
        "gravity": [0.0, 0.0, -9.81],
        "bodies": [body(1, "rod", 78.0, [0.0325, 104.0, 104.0], lambda _: (2.0 * x, frame(x, y)))],
        "constraints": [
            {"kind": "RJ", "i": 1, "j": 0, "point": [0.0, 0.0, 0.0], "axis": [0.0, 1.0, 0.0]},
            # Angle between the rod's y axis and -Z is pi/2 + pi/4 cos 2t.
            {"kind": "DP1", "i": 1, "j": 0, "a_i": [0.0, 1.0, 0.0], "a_j": [0.0, 0.0, -1.0],
             "driver": {"kind": "cosine", "c0": math.pi / 2, "c1": math.pi / 4,
                        "omega": 2.0, "phi0": 0.0, "angle": True}},
        ],
    }


def double_pendulum():
    return {
        "name": "double_pendulum",
        "gravity": [0.0, 0.0, -9.81],
        "bodies": [
            body(1, "rod1", 78.0, [0.0325, 104.0, 104.0],
                 lambda _: (np.array([0.0, 2.0, 0.0]), frame(Y, Z))),
            body(2, "rod2", 39.0, [0.01625, 13.01, 13.01],
                 lambda _: (np.array([0.0, 4.0, -1.0]), frame(-Z, Y))),
        ],
        "constraints": [
            {"kind": "RJ", "i": 1, "j": 0, "point": [0.0, 0.0, 0.0], "axis": [1.0, 0.0, 0.0]},
            {"kind": "RJ", "i": 2, "j": 1, "point": [0.0, 4.0, 0.0], "axis": [1.0, 0.0, 0.0]},
        ],
    }


SC_CRANK, SC_ROD, SC_Y, SC_Z = 0.08, 0.3, 0.04, 0.12
SC_OFFSET = 0.02  # pin point sits this far inboard of the crank tip
# The cosine drive loses rank whenever the crank passes a multiple of pi.
# Phases are set so those instants fall between the points of the 1e-2,
# 1e-3 and 1e-4 time grids.
SC_ALPHA0 = 2 * math.pi * 0.04745


def slider_crank_pose(alpha):
    """Crank angle alpha about Z -> poses of crank, rod, slider."""
    arm = np.array([np.cos(alpha), np.sin(alpha), 0.0 * alpha])
    tip = SC_CRANK * arm
    dy, dz = SC_Y - tip[1], SC_Z - tip[2]
    slider = np.array([tip[0] + np.sqrt(SC_ROD**2 - dy**2 - dz**2), SC_Y + 0 * alpha, SC_Z + 0 * alpha])
    u = unit(slider - tip)
    return [(tip / 2, frame(Z + 0 * alpha, arm)),
            ((tip + slider) / 2, frame(u, np.cross(unit(np.cross(Z, u)), u))),
            (slider, frame(X + 0 * alpha, Z + 0 * alpha))]


def slider_crank():
    rate = -2.0 * math.pi
    pose = lambda k: (lambda a: slider_crank_pose(SC_ALPHA0 + a)[k])
    rate_of = lambda k: (lambda a: slider_crank_pose(a)[k], SC_ALPHA0, rate)
    slider = np.real(slider_crank_pose(SC_ALPHA0)[2][0])
    pin_p = [0.0, SC_CRANK / 2 - SC_OFFSET, 0.0]
    pin_q = [-SC_ROD / 2, 0.0, 0.0]
    return {
        "name": "slider_crank",
        "gravity": [0.0, 0.0, -9.81],
        "bodies": [
            body(1, "crank", 0.12, [6.4e-5, 1e-6, 6.4e-5], pose(0), rate_of(0)),
            body(2, "rod", 0.5, [1e-4, 3.75e-3, 3.75e-3], pose(1), rate_of(1)),
            body(3, "slider", 2.0, [5e-3, 5e-3, 5e-3], pose(2), rate_of(2)),
        ],
        "constraints": [
            {"kind": "RJ", "i": 1, "j": 0, "point": [0.0, 0.0, 0.0], "axis": [0.0, 0.0, 1.0]},
            # Pin: the rod end stays at a fixed offset along the crank arm,
            # expressed as a distance plus two normality conditions.
            {"kind": "D", "i": 1, "j": 2, "s_p": pin_p, "s_q": pin_q,
             "driver": {"kind": "constant", "c": SC_OFFSET**2}},
            {"kind": "DP2", "i": 1, "j": 2, "a_i": [1.0, 0.0, 0.0], "s_p": pin_p, "s_q": pin_q},
            {"kind": "DP2", "i": 1, "j": 2, "a_i": [0.0, 0.0, 1.0], "s_p": pin_p, "s_q": pin_q},
            {"kind": "UJ", "i": 2, "j": 3, "point": vec(slider),
             "a_i": [0.0, 0.0, 1.0], "c_j": [0.0, 1.0, 0.0]},
            {"kind": "TJ", "i": 3, "j": 0, "point": vec(slider), "axis": [1.0, 0.0, 0.0]},
            # Crank turns about its -x axis at 2 pi rad/s: arm . X = cos(alpha0 - 2 pi t).
            {"kind": "DP1", "i": 1, "j": 0, "a_i": [0.0, 1.0, 0.0], "a_j": [1.0, 0.0, 0.0],
             "driver": {"kind": "cosine", "c0": 0.0, "c1": 1.0, "omega": rate,
                        "phi0": SC_ALPHA0}},
        ],
    }


FL_ROTOR, FL_COUPLER, FL_ROCKER = 2.0, 6.0, 4.0
FL_PIVOT2 = np.array([4.0, 0.0, 0.0])
FL_ALPHA0 = math.pi * 0.15955


def four_link_pose(alpha):
    """Rotor angle alpha about X -> poses of rotor, coupler, rocker."""
    arm = np.array([0.0 * alpha, np.cos(alpha), np.sin(alpha)])
    # |tip1 - tip2| = 6 reduces to tan(beta) = 2 / sin(alpha), beta in (0, pi).
    beta = np.arctan(2.0 / np.sin(alpha))
    arm2 = np.array([np.cos(beta), 0.0 * alpha, np.sin(beta)])
    tip1 = FL_ROTOR * arm
    tip2 = FL_PIVOT2 + FL_ROCKER * arm2
    u = unit(tip2 - tip1)
    return [(tip1 / 2, frame(arm, np.cross(X, arm))),
            ((tip1 + tip2) / 2, frame(u, unit(np.cross(Y, u)))),
            ((FL_PIVOT2 + tip2) / 2, frame(arm2, np.cross(Y, arm2)))]


def four_link():
    rate = math.pi
    pose = lambda k: (lambda a: four_link_pose(FL_ALPHA0 + a)[k])
    rate_of = lambda k: (lambda a: four_link_pose(a)[k], FL_ALPHA0, rate)
    p = four_link_pose(FL_ALPHA0)
    tip1 = 2.0 * np.real(p[0][0])
    tip2 = 2.0 * np.real(p[2][0]) - FL_PIVOT2
    assert abs(np.linalg.norm(tip2 - tip1) - FL_COUPLER) < 1e-12
    return {
        "name": "four_link",
        "gravity": [0.0, 0.0, -9.81],
        "bodies": [
            body(1, "rotor", 2.0, [0.01, 2.0 / 3.0, 2.0 / 3.0], pose(0), rate_of(0)),
            body(2, "coupler", 1.0, [0.01, 3.0, 3.0], pose(1), rate_of(1)),
            body(3, "rocker", 1.0, [0.01, 4.0 / 3.0, 4.0 / 3.0], pose(2), rate_of(2)),
        ],
        "constraints": [
            {"kind": "RJ", "i": 1, "j": 0, "point": [0.0, 0.0, 0.0], "axis": [1.0, 0.0, 0.0]},
            {"kind": "SJ", "i": 1, "j": 2, "point": vec(tip1)},
            {"kind": "UJ", "i": 2, "j": 3, "point": vec(tip2),
             "a_i": [0.0, 1.0, 0.0], "c_j": [0.0, 0.0, 1.0]},
            {"kind": "RJ", "i": 3, "j": 0, "point": vec(FL_PIVOT2), "axis": [0.0, 1.0, 0.0]},
            # Rotor turns about its z axis at pi rad/s: arm . Y = cos(alpha0 + pi t).
            {"kind": "DP1", "i": 1, "j": 0, "a_i": [1.0, 0.0, 0.0], "a_j": [0.0, 1.0, 0.0],
             "driver": {"kind": "cosine", "c0": 0.0, "c1": 1.0, "omega": rate,
                        "phi0": FL_ALPHA0}},
        ],
    }


def main():
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "models")
    for name, fn in [("pendulum", pendulum), ("double_pendulum", double_pendulum),
                     ("slider_crank", slider_crank), ("four_link", four_link)]:
        with open(os.path.join(out, name + ".json"), "w") as f:
            json.dump(fn(), f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
