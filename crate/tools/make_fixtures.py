#!/usr/bin/env python3
"""Writes crates/core/fixtures/*.json from independent reference computations.

Nothing here calls into the Rust crate. Depth inversion uses numeric root
finding on the forward model, overlaps use shapely, loss derivatives use
sympy, and AP uses a brute-force cutoff enumeration.
"""

import json
import math
import os
import sys

import numpy as np
import sympy as sp
from scipy.optimize import brentq
from shapely.geometry import Polygon, box as sbox

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "fixtures")

KITTI = {"f_u": 721.5377, "f_v": 721.5377, "c_u": 609.5593, "c_v": 172.854,
         "t": [44.85728, 0.2163791, 0.002745884]}
PLAIN = {"f_u": 721.5377, "f_v": 721.5377, "c_u": 609.5593, "c_v": 172.854}


def fixture(name, op, inp, expected, tag, oracle, tol=None):
    f = {"name": name, "operation": op, "input": inp, "expected": expected,
         "provenance": {"tag": tag, "oracle": oracle}}
    if tol is not None:
        f["tolerance"] = tol
    return f


# ---------------------------------------------------------------- camera

def pmat(cam):
    t = cam.get("t", [0.0, 0.0, 0.0])
    return np.array([[cam["f_u"], 0, cam["c_u"], t[0]],
                     [0, cam["f_v"], cam["c_v"], t[1]],
                     [0, 0, 1, t[2]]], dtype=float)


def project(p, cam):
    h = pmat(cam) @ np.array([p[0], p[1], p[2], 1.0])
    return h[0] / h[2], h[1] / h[2]


def backproject(u, v, z, cam):
    P = pmat(cam)
    # unknowns x, y with z fixed: rows (P0 - u P2) X = 0, (P1 - v P2) X = 0
    r0 = P[0] - u * P[2]
    r1 = P[1] - v * P[2]
    A = np.array([[r0[0], r0[1]], [r1[0], r1[1]]])
    b = -np.array([r0[2] * z + r0[3], r1[2] * z + r1[3]])
    x, y = np.linalg.solve(A, b)
    return [float(x), float(y), float(z)]


def camera_fixtures():
    out = []
    for i, (p, cam) in enumerate([([1.0, 1.5, 10.0], PLAIN), ([-3.2, 1.7, 25.0], KITTI), ([0.0, 0.0, 5.0], PLAIN)]):
        u, v = project(p, cam)
        out.append(fixture(f"project_point_{i}", "project_point", {"point": p, "camera": cam},
                           {"u": u, "v": v, "z": p[2]}, "derived", "homogeneous 3x4 matrix product"))
    out.append(fixture("project_point_on_axis", "project_point", {"point": [0.0, 0.0, 10.0], "camera": PLAIN},
                       {"u": PLAIN["c_u"], "v": PLAIN["c_v"], "z": 10.0}, "trivial",
                       "optical-axis point lands on the principal point"))
    out.append(fixture("project_point_behind", "project_point", {"point": [0.0, 0.0, -1.0], "camera": PLAIN},
                       {"error": "domain"}, "trivial", "negative depth is outside the domain"))
    for i, (u, v, z, cam) in enumerate([(700.0, 200.0, 12.0, KITTI), (10.0, 370.0, 3.5, PLAIN)]):
        out.append(fixture(f"backproject_pixel_{i}", "backproject_pixel", {"u": u, "v": v, "z": z, "camera": cam},
                           backproject(u, v, z, cam), "derived", "2x2 linear solve of the projection rows"))
    out.append(fixture("backproject_pixel_zero_depth", "backproject_pixel",
                       {"u": 1.0, "v": 1.0, "z": 0.0, "camera": PLAIN}, {"error": "domain"}, "trivial",
                       "zero depth is outside the domain"))
    depth = [10.0, None, 5.5, 30.0, None, 2.0]
    pts = []
    for k, d in enumerate(depth):
        r, c = divmod(k, 3)
        pts.append(None if d is None else backproject(c, r, d, KITTI))
    out.append(fixture("backproject_depth_map_2x3", "backproject_depth_map",
                       {"rows": 2, "cols": 3, "depth": depth, "camera": KITTI}, pts, "derived",
                       "per-cell linear solve with (u, v) = (col, row)"))
    out.append(fixture("backproject_depth_map_empty", "backproject_depth_map",
                       {"rows": 0, "cols": 0, "depth": [], "camera": PLAIN}, {"error": "input"}, "trivial",
                       "empty grid"))
    for i, v in enumerate([172.854, 250.0, 100.0]):
        out.append(fixture(f"beta_from_pixel_{i}", "beta_from_pixel", {"v": v, "camera": PLAIN},
                           math.atan2(v - PLAIN["c_v"], PLAIN["f_v"]), "derived", "atan2 of the row offset"))
    return out


# ---------------------------------------------------------------- geometry

def rot_y(ry):
    c, s = math.cos(ry), math.sin(ry)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def offsets(w, h, l, ry):
    R = rot_y(ry)
    res = []
    for i in range(8):
        bx, by, bz = (i >> 2) & 1, (i >> 1) & 1, i & 1
        local = np.array([(1 if bx else -1) * l / 2, 0.0 if by else -h, (1 if bz else -1) * w / 2])
        res.append([float(x) for x in R @ local])
    return res


def corners(b):
    return [[b["x"] + o[0], b["y"] + o[1], b["z"] + o[2]] for o in offsets(b["w"], b["h"], b["l"], b["ry"])]


def project_box(b, cam):
    uv = [project(c, cam) for c in corners(b)]
    us, vs = [p[0] for p in uv], [p[1] for p in uv]
    return [min(us), min(vs), max(us), max(vs)]


def dz_max(w, l, ry):
    return max(abs(o[2]) for o in offsets(w, 1.0, l, ry))


def wrap(a):
    a = math.fmod(a + math.pi, 2 * math.pi)
    if a < 0:
        a += 2 * math.pi
    return a - math.pi


CAR_A = {"w": 1.67, "h": 1.65, "l": 3.64, "x": -0.65, "y": 1.71, "z": 46.70, "ry": -1.59}
CAR_B = {"w": 1.6, "h": 1.5, "l": 3.9, "x": 2.5, "y": 1.7, "z": 12.0, "ry": 0.7}
CAR_C = {"w": 1.8, "h": 1.45, "l": 4.3, "x": -4.0, "y": 1.65, "z": 8.0, "ry": 2.9}


def geometry_fixtures():
    out = []
    for i, (w, h, l, ry) in enumerate([(1.6, 1.5, 3.9, 0.0), (1.6, 1.5, 3.9, math.pi / 2), (1.8, 1.45, 4.3, 0.7)]):
        out.append(fixture(f"corner_offsets_{i}", "corner_offsets", {"w": w, "h": h, "l": l, "ry": ry},
                           offsets(w, h, l, ry), "derived", "rotation matrix about y applied to local corners"))
    out.append(fixture("corner_offsets_bad_dims", "corner_offsets", {"w": 0.0, "h": 1.0, "l": 1.0, "ry": 0.0},
                       {"error": "domain"}, "trivial", "zero width"))
    for i, b in enumerate([CAR_A, CAR_B]):
        out.append(fixture(f"corners_camera_{i}", "corners_camera", {"box": b}, corners(b), "derived",
                           "bottom center plus rotated offsets"))
    for i, (w, l, ry) in enumerate([(1.6, 3.9, 0.0), (1.6, 3.9, math.pi / 2), (1.6, 3.9, 0.7), (1.8, 4.3, -2.4)]):
        out.append(fixture(f"delta_z_max_{i}", "delta_z_max", {"w": w, "l": l, "ry": ry}, dz_max(w, l, ry),
                           "derived", "brute-force max |dz| over the eight corners"))
    for i, (b, cam) in enumerate([(CAR_A, KITTI), (CAR_B, PLAIN), (CAR_C, KITTI)]):
        out.append(fixture(f"project_box_{i}", "project_box", {"box": b, "camera": cam}, project_box(b, cam),
                           "derived", "min/max over eight projected corners"))
    behind = dict(CAR_B, z=1.0)
    out.append(fixture("project_box_behind", "project_box", {"box": behind, "camera": PLAIN}, {"error": "domain"},
                       "trivial", "box straddles the image plane"))
    for i, (ry, x, z) in enumerate([(0.0, 0.0, 10.0), (-1.59, -0.65, 46.7), (3.0, 5.0, 5.0), (-3.0, -5.0, 5.0)]):
        out.append(fixture(f"alpha_from_ry_{i}", "alpha_from_ry", {"ry": ry, "x": x, "z": z},
                           wrap(ry - math.atan2(x, z)), "derived", "ry minus viewing azimuth, wrapped"))
    for i, (a, x, z) in enumerate([(0.5, 3.0, 10.0), (-3.1, -2.0, 4.0)]):
        out.append(fixture(f"ry_from_alpha_{i}", "ry_from_alpha", {"alpha": a, "x": x, "z": z},
                           wrap(a + math.atan2(x, z)), "derived", "alpha plus viewing azimuth, wrapped"))
    out.append(fixture("alpha_from_ry_zero_depth", "alpha_from_ry", {"ry": 0.0, "x": 1.0, "z": 0.0},
                       {"error": "domain"}, "trivial", "azimuth undefined at z = 0"))
    return out


# ---------------------------------------------------------------- depth

def h_fwd(model, z, beta, H, dz, f):
    y = z * math.tan(beta)
    if model == "paired":
        return f * (y + H) / (z - dz) - f * y / (z + dz)
    return f * y / (z - dz) - f * (y - H) / (z + dz)


def depth_by_roots(model, h, beta, H, dz, f):
    """Largest z > dz with h_fwd(z) = h, found by scanning and bisection."""
    g = lambda z: h_fwd(model, z, beta, H, dz, f) - h
    lo = dz + 1e-9 * max(1.0, dz)
    grid = np.geomspace(max(lo - dz, 1e-9), 1e6, 200001) + dz
    vals = [g(z) for z in grid]
    roots = []
    for a, b, ga, gb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if ga == 0:
            roots.append(a)
        elif ga * gb < 0:
            roots.append(brentq(g, a, b, xtol=1e-14, rtol=1e-15, maxiter=500))
    if not roots:
        return None
    return max(roots)


def depth_fixtures():
    out = []
    cases = [(20.0, 0.05, 1.5, 1.2, 721.5377), (45.0, 0.03, 1.65, 0.5, 700.0), (8.0, 0.15, 1.4, 2.3, 650.0),
             (30.0, -0.02, 1.8, 1.0, 720.0)]
    for model in ["paired", "bottom-anchored"]:
        for i, (z, beta, H, dz, f) in enumerate(cases):
            if model == "bottom-anchored" and z * math.tan(beta) <= H:
                continue
            h = h_fwd(model, z, beta, H, dz, f)
            inp = {"z": z, "beta": beta, "H": H, "dz": dz, "f_v": f, "model": model}
            out.append(fixture(f"height_forward_{model}_{i}", "height_forward", inp, h, "derived",
                               "direct evaluation of the near/far row pairing"))
    out.append(fixture("height_forward_similar_triangles", "height_forward",
                       {"z": 10.0, "beta": 0.0, "H": 1.5, "dz": 0.0, "f_v": 700.0}, 105.0, "trivial",
                       "dz = 0 and beta = 0 reduce to f H / z"))
    out.append(fixture("height_forward_inside_box", "height_forward",
                       {"z": 1.0, "beta": 0.0, "H": 1.5, "dz": 2.0, "f_v": 700.0}, {"error": "domain"}, "trivial",
                       "z <= dz"))
    obs_cases = [(30.0, 0.05, 1.51, 1.0, 721.5377), (120.0, 0.16, 1.5, 2.2, 721.5377), (15.0, -0.04, 1.7, 0.3, 700.0),
                 (40.0, 0.1, 1.45, 2.0, 721.5377)]
    for model in ["paired", "bottom-anchored"]:
        for i, (h, beta, H, dz, f) in enumerate(obs_cases):
            z = depth_by_roots(model, h, beta, H, dz, f)
            inp = {"h": h, "beta": beta, "H": H, "dz": dz, "f_v": f, "model": model}
            out.append(fixture(f"depth_full_{model}_{i}", "depth_full", inp,
                               z if z is not None else {"error": "domain"}, "derived",
                               "largest root of the forward model by scan and bisection", 1e-8))
    out.append(fixture("depth_full_degenerate", "depth_full",
                       {"h": 35.0, "beta": 0.07, "H": 1.52, "dz": 0.0, "f_v": 721.5377}, 721.5377 * 1.52 / 35.0,
                       "trivial", "dz = 0 reduces to f H / h"))
    out.append(fixture("depth_full_negative_discriminant", "depth_full",
                       {"h": 100.0, "beta": -0.1, "H": 1.0, "dz": 3.0, "f_v": 700.0, "model": "bottom-anchored"},
                       {"error": "domain"}, "derived", "forward model never reaches h = 100 px for z > dz"))
    out.append(fixture("depth_full_tiny_box", "depth_full",
                       {"h": 0.1, "beta": 0.0, "H": 1.5, "dz": 1.0, "f_v": 700.0}, {"error": "domain"}, "trivial",
                       "sub-pixel height"))
    for i, (h, beta, H, dz, f) in enumerate(obs_cases[:3]):
        out.append(fixture(f"depth_v1_{i}", "depth_v1", {"h": h, "beta": beta, "H": H, "dz": dz, "f_v": f},
                           f / h * (2 * math.tan(beta) * dz + H), "derived", "first-term approximation"))
    for i, (h, H, k) in enumerate([(30.0, 1.51, 721.5377), (52.0, 1.7, 700.0)]):
        out.append(fixture(f"depth_v2_{i}", "depth_v2", {"h": h, "H": H, "k": k}, k * H / h, "derived",
                           "similar triangles with scale k"))
    out.append(fixture("depth_v2_zero_height", "depth_v2", {"h": 0.0, "H": 1.5, "k": 700.0}, {"error": "domain"},
                       "trivial", "zero pixel height"))

    boxes = [CAR_B, CAR_C, {"w": 1.6, "h": 1.5, "l": 3.9, "x": 0.0, "y": 1.7, "z": 30.0, "ry": 0.0},
             {"w": 1.6, "h": 1.5, "l": 3.9, "x": 0.0, "y": 1.7, "z": 1.0, "ry": 0.0}]
    rows = []
    for idx, b in enumerate(boxes):
        try:
            lt = project_box(b, PLAIN)
            if any(c[2] <= 0 for c in corners(b)):
                raise ValueError
        except ValueError:
            rows.append({"index": idx, "z_true": b["z"], "z_full": None})
            continue
        h = lt[3] - lt[1]
        _, v0 = project([b["x"], b["y"], b["z"]], PLAIN)
        beta = math.atan2(v0 - PLAIN["c_v"], PLAIN["f_v"])
        dz = dz_max(b["w"], b["l"], b["ry"])
        f = PLAIN["f_v"]
        rows.append({"index": idx, "z_true": b["z"], "h": h, "beta": beta, "dz": dz,
                     "z_full": depth_by_roots("bottom-anchored", h, beta, b["h"], dz, f),
                     "z_v1": f / h * (2 * math.tan(beta) * dz + b["h"]), "z_v2": f * b["h"] / h,
                     "status": "ok"})
    out.append(fixture("compare_formulas_mixed", "compare_formulas",
                       {"boxes": boxes, "camera": PLAIN, "model": "bottom-anchored"}, rows, "derived",
                       "corner projection plus root-finding inverse per box; last box straddles the camera", 1e-8))
    return out


# ---------------------------------------------------------------- kitti io

LABEL_FIELDS = ["category", "truncation", "occlusion", "alpha", "bbox", "dims", "location", "rotation_y", "score"]


def parse_label(line):
    t = line.split()
    rec = {"category": t[0], "truncation": float(t[1]), "occlusion": int(t[2]), "alpha": float(t[3]),
           "bbox": [float(x) for x in t[4:8]], "dims": [float(x) for x in t[8:11]],
           "location": [float(x) for x in t[11:14]], "rotation_y": float(t[14]),
           "score": float(t[15]) if len(t) > 15 else None}
    return rec


def serialize(rec):
    s = "%s %.2f %d %.2f" % (rec["category"], rec["truncation"], rec["occlusion"], rec["alpha"])
    for v in rec["bbox"] + rec["dims"] + rec["location"] + [rec["rotation_y"]]:
        s += " %.2f" % v
    if rec["score"] is not None:
        s += " %.4f" % rec["score"]
    return s


GOLDEN = [
    "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59",
    "Pedestrian 0.00 0 -0.20 712.40 143.00 810.73 307.92 1.89 0.48 1.20 1.84 1.47 8.41 0.01",
    "Van 0.00 1 -1.61 536.29 178.93 567.13 206.66 2.26 1.78 4.73 -2.54 1.79 53.62 -1.66",
    "Cyclist 0.36 1 2.17 1176.66 180.89 1241.00 263.54 1.70 0.60 1.79 11.20 1.62 13.51 2.85",
    "DontCare -1 -1 -10 503.89 169.71 590.61 190.13 -1 -1 -1 -1000 -1000 -1000 -10",
    "Car 0.00 0 1.85 387.63 181.54 423.81 203.12 1.67 1.87 3.69 -16.53 2.39 58.49 1.57 0.9312",
]

CALIB = """P0: 7.215377000000e+02 0.000000000000e+00 6.095593000000e+02 0.000000000000e+00 0.000000000000e+00 7.215377000000e+02 1.728540000000e+02 0.000000000000e+00 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 0.000000000000e+00
P1: 7.215377000000e+02 0.000000000000e+00 6.095593000000e+02 -3.875744000000e+02 0.000000000000e+00 7.215377000000e+02 1.728540000000e+02 0.000000000000e+00 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 0.000000000000e+00
P2: 7.215377000000e+02 0.000000000000e+00 6.095593000000e+02 4.485728000000e+01 0.000000000000e+00 7.215377000000e+02 1.728540000000e+02 2.163791000000e-01 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 2.745884000000e-03
P3: 7.215377000000e+02 0.000000000000e+00 6.095593000000e+02 -3.395242000000e+02 0.000000000000e+00 7.215377000000e+02 1.728540000000e+02 2.199936000000e+00 0.000000000000e+00 0.000000000000e+00 1.000000000000e+00 2.729905000000e-03
R0_rect: 9.999239000000e-01 9.837760000000e-03 -7.445048000000e-03 -9.869795000000e-03 9.999421000000e-01 -4.278459000000e-03 7.402527000000e-03 4.351614000000e-03 9.999631000000e-01
Tr_velo_to_cam: 7.533745000000e-03 -9.999714000000e-01 -6.166020000000e-04 -4.069766000000e-03 1.480249000000e-02 7.280733000000e-04 -9.998902000000e-01 -7.631618000000e-02 9.998621000000e-01 7.523790000000e-03 1.480755000000e-02 -2.717806000000e-01
Tr_imu_to_velo: 9.999976000000e-01 7.553071000000e-04 -2.035826000000e-03 -8.086759000000e-01 -7.854027000000e-04 9.998898000000e-01 -1.482298000000e-02 3.195559000000e-01 2.024406000000e-03 1.482454000000e-02 9.998881000000e-01 -7.997231000000e-01
"""


def calib_camera(text, ref="P2"):
    for line in text.splitlines():
        if line.startswith(ref + ":"):
            m = [float(x) for x in line.split(":", 1)[1].split()]
            return {"f_u": m[0], "f_v": m[5], "c_u": m[2], "c_v": m[6], "t": [m[3], m[7], m[11]]}
    raise KeyError(ref)


def kitti_fixtures():
    out = []
    for i, line in enumerate(GOLDEN):
        out.append(fixture(f"parse_label_line_golden_{i}", "parse_label_line", {"line": line}, parse_label(line),
                           "derived", "positional field split"))
        out.append(fixture(f"serialize_label_golden_{i}", "serialize_label", {"record": parse_label(line)},
                           serialize(parse_label(line)), "derived", "printf-style two-decimal formatting"))
    for i, bad in enumerate(["Car 0.00 0 -1.58 587.01 173.33 614.12",
                             "Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 inf -1.59",
                             "Car 0.00 x -1.58 587.01 173.33 614.12 200.12 1.65 1.67 3.64 -0.65 1.71 46.70 -1.59"]):
        out.append(fixture(f"parse_label_line_malformed_{i}", "parse_label_line", {"line": bad},
                           {"error": "parse"}, "trivial", "truncated or non-numeric field"))
    out.append(fixture("parse_calib_file_kitti", "parse_calib_file", {"text": CALIB},
                       {"keys": ["P0", "P1", "P2", "P3", "R0_rect", "Tr_velo_to_cam", "Tr_imu_to_velo"],
                        "camera": calib_camera(CALIB)}, "derived", "positional entries 0, 5, 2, 6 and column 4 of P2"))
    out.append(fixture("parse_calib_file_p3", "parse_calib_file", {"text": CALIB, "reference": "P3"},
                       {"camera": calib_camera(CALIB, "P3")}, "derived", "positional entries of P3"))
    short = CALIB.replace("2.745884000000e-03", "")
    out.append(fixture("parse_calib_file_short_p2", "parse_calib_file", {"text": short}, {"error": "calib"},
                       "trivial", "P2 with 11 values"))
    missing = "\n".join(l for l in CALIB.splitlines() if not l.startswith("P2"))
    out.append(fixture("parse_calib_file_missing_p2", "parse_calib_file", {"text": missing}, {"error": "calib"},
                       "trivial", "no reference matrix"))
    labels = {"000001": "\n".join(GOLDEN[:3]) + "\n", "000002": GOLDEN[0] + "\n"}
    out.append(fixture("load_frame_set_partial", "load_frame_set",
                       {"labels": labels, "calib": {"000001": CALIB}, "ids": ["000002", "000001"]},
                       [{"id": "000001", "ok": True, "objects": 3, "f_v": 721.5377},
                        {"id": "000002", "ok": False, "error": "io"}], "derived",
                       "ascending ids; missing calibration reported per frame"))
    out.append(fixture("load_frame_set_all_missing", "load_frame_set",
                       {"labels": labels, "calib": {}, "ids": ["000001"]}, {"error": "input"}, "trivial",
                       "every requested frame failed"))
    return out


# ---------------------------------------------------------------- evaluation

def footprint_poly(b):
    c = corners(b)
    pts = [(c[i][0], c[i][2]) for i in (2, 3, 7, 6)]
    return Polygon(pts)


def iou_bev(a, b):
    pa, pb = footprint_poly(a), footprint_poly(b)
    inter = pa.intersection(pb).area
    return inter / (pa.area + pb.area - inter) if inter > 0 else 0.0


def iou_3d(a, b):
    pa, pb = footprint_poly(a), footprint_poly(b)
    dy = max(0.0, min(a["y"], b["y"]) - max(a["y"] - a["h"], b["y"] - b["h"]))
    inter = pa.intersection(pb).area * dy
    va, vb = a["w"] * a["h"] * a["l"], b["w"] * b["h"] * b["l"]
    return inter / (va + vb - inter) if inter > 0 else 0.0


def iou_2d(a, b):
    A, B = sbox(*a), sbox(*b)
    inter = A.intersection(B).area
    return inter / (A.area + B.area - inter) if inter > 0 else 0.0


def difficulty(rec):
    h = rec["bbox"][3] - rec["bbox"][1]
    for name, mh, occ, tr in [("easy", 40, 0, 0.15), ("moderate", 25, 1, 0.30), ("hard", 25, 2, 0.50)]:
        if h >= mh and rec["occlusion"] <= occ and rec["truncation"] <= tr:
            return name
    return "ignored"


RANK = {"easy": 0, "moderate": 1, "hard": 2}


def label_of_box(cat, b, cam, trunc=0.0, occ=0, score=None, bbox=None):
    bb = bbox if bbox is not None else project_box(b, cam)
    alpha = wrap(b["ry"] - math.atan2(b["x"], b["z"]))
    s = "%s %.2f %d %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f %.2f" % (
        cat, trunc, occ, alpha, bb[0], bb[1], bb[2], bb[3], b["h"], b["w"], b["l"], b["x"], b["y"], b["z"], b["ry"])
    if score is not None:
        s += " %.4f" % score
    return s


def box_of(rec):
    h, w, l = rec["dims"]
    x, y, z = rec["location"]
    return {"w": w, "h": h, "l": l, "x": x, "y": y, "z": z, "ry": rec["rotation_y"]}


def oracle_ap(dets, gts, iou_thr, npos, task, diff, cat):
    dets = [parse_label(d) for d in dets]
    gts = [parse_label(g) for g in gts]
    neighbor = {"Car": "Van", "Pedestrian": "Person_sitting"}.get(cat)
    cands, dontcare = [], []
    for g in gts:
        if g["category"] == "DontCare":
            dontcare.append(g["bbox"])
        elif g["category"] == cat:
            d = difficulty(g)
            cands.append((g, d != "ignored" and RANK[d] <= RANK[diff]))
        elif g["category"] == neighbor:
            cands.append((g, False))
    num_gt = sum(1 for _, v in cands if v)
    min_h = 40 if diff == "easy" else 25
    ds = [d for d in dets if d["category"] == cat and d["bbox"][3] - d["bbox"][1] >= min_h]
    ds = sorted(enumerate(ds), key=lambda t: (-t[1]["score"], t[0]))

    def ov(d, g):
        if task == "2d":
            return iou_2d(d["bbox"], g["bbox"])
        fn = iou_bev if task == "bev" else iou_3d
        return fn(box_of(d), box_of(g))

    taken = [False] * len(cands)
    outcomes = []
    for _, d in ds:
        best, bo = None, -1.0
        for j, (g, _) in enumerate(cands):
            if taken[j]:
                continue
            o = ov(d, g)
            if o >= iou_thr and o > bo:
                best, bo = j, o
        if best is not None:
            taken[best] = True
            outcomes.append("tp" if cands[best][1] else "ign")
        else:
            cov = []
            for dc in dontcare:
                A, B = sbox(*d["bbox"]), sbox(*dc)
                cov.append(A.intersection(B).area / A.area)
            outcomes.append("ign" if any(c >= iou_thr for c in cov) else "fp")
    seq = [o for o in outcomes if o != "ign"]
    grid = [i / 10 for i in range(11)] if npos == 11 else [i / 40 for i in range(1, 41)]
    # brute force: precision/recall of every top-k prefix
    pts = []
    for k in range(1, len(seq) + 1):
        tp = seq[:k].count("tp")
        if num_gt:
            pts.append((tp / num_gt, tp / k))
    ap = 100 * sum(max([p for r, p in pts if r >= g] or [0.0]) for g in grid) / len(grid)
    tp = seq.count("tp")
    return {"ap": ap, "num_gt": num_gt, "true_positives": tp, "false_positives": seq.count("fp"),
            "false_negatives": num_gt - tp, "ignored_detections": outcomes.count("ign")}


def eval_fixtures():
    out = []
    for i, (a, b) in enumerate([([0, 0, 10, 10], [5, 5, 15, 15]), ([0, 0, 10, 10], [20, 20, 30, 30]),
                                ([100.5, 50.25, 180.0, 120.0], [110.0, 40.0, 175.5, 130.0])]):
        out.append(fixture(f"iou_2d_{i}", "iou_2d", {"a": a, "b": b}, iou_2d(a, b), "derived", "shapely rectangles"))
    out.append(fixture("iou_2d_identical", "iou_2d", {"a": [1, 2, 3, 4], "b": [1, 2, 3, 4]}, 1.0, "trivial",
                       "self overlap"))
    pairs = [(CAR_B, dict(CAR_B, x=3.0, ry=0.9)), (CAR_B, dict(CAR_B, ry=CAR_B["ry"] + math.pi / 4)),
             (CAR_C, dict(CAR_C, z=8.8, y=1.9, h=1.6, ry=2.5)), (CAR_A, CAR_B)]
    for i, (a, b) in enumerate(pairs):
        out.append(fixture(f"iou_bev_{i}", "iou_bev", {"a": a, "b": b}, iou_bev(a, b), "derived",
                           "shapely polygon intersection of footprints"))
        out.append(fixture(f"iou_3d_{i}", "iou_3d", {"a": a, "b": b}, iou_3d(a, b), "derived",
                           "shapely footprint intersection times vertical overlap"))
    for i, line in enumerate(GOLDEN[:5]):
        out.append(fixture(f"assign_difficulty_{i}", "assign_difficulty", {"line": line},
                           difficulty(parse_label(line)), "derived", "threshold table on height, occlusion, truncation"))

    rng = np.random.default_rng(7)
    for inst in range(6):
        gts, dets = [], []
        ng = int(rng.integers(1, 5))
        for _ in range(ng):
            b = {"w": round(float(rng.uniform(1.5, 1.9)), 2), "h": round(float(rng.uniform(1.4, 1.7)), 2),
                 "l": round(float(rng.uniform(3.5, 4.5)), 2), "x": round(float(rng.uniform(-8, 8)), 2), "y": 1.7,
                 "z": round(float(rng.uniform(8, 40)), 2), "ry": round(float(rng.uniform(-3, 3)), 2)}
            occ = int(rng.integers(0, 3))
            gts.append(label_of_box("Car", b, PLAIN, occ=occ))
            for _ in range(int(rng.integers(0, 3))):
                jb = dict(b, x=round(b["x"] + float(rng.normal(0, 0.4)), 2), z=round(b["z"] + float(rng.normal(0, 0.6)), 2),
                          ry=round(b["ry"] + float(rng.normal(0, 0.2)), 2))
                dets.append(label_of_box("Car", jb, PLAIN, score=round(float(rng.uniform(0.05, 0.99)), 4)))
        for _ in range(int(rng.integers(0, 3))):
            b = {"w": 1.6, "h": 1.5, "l": 3.9, "x": round(float(rng.uniform(-8, 8)), 2), "y": 1.7,
                 "z": round(float(rng.uniform(8, 40)), 2), "ry": 0.3}
            dets.append(label_of_box("Car", b, PLAIN, score=round(float(rng.uniform(0.05, 0.99)), 4)))
        if inst == 5:
            gts.append(GOLDEN[4])
            gts.append(label_of_box("Van", CAR_B, PLAIN))
        for task, thr in [("3d", 0.5), ("bev", 0.5), ("2d", 0.7)]:
            for npos in (11, 40):
                for diff in ("easy", "moderate", "hard"):
                    inp = {"dets": dets, "gts": gts, "iou": thr, "recall": npos, "task": task, "difficulty": diff,
                           "category": "Car"}
                    out.append(fixture(f"evaluate_ap_{inst}_{task}_{npos}_{diff}", "evaluate_ap", inp,
                                       oracle_ap(dets, gts, thr, npos, task, diff, "Car"), "derived",
                                       "greedy matching plus brute-force prefix enumeration", 1e-9))
    perfect_gts = [label_of_box("Car", CAR_B, PLAIN), label_of_box("Car", CAR_C, PLAIN)]
    perfect_dets = [label_of_box("Car", CAR_B, PLAIN, score=0.9), label_of_box("Car", CAR_C, PLAIN, score=0.8)]
    inp = {"dets": perfect_dets, "gts": perfect_gts, "iou": 0.7, "recall": 40, "task": "3d", "difficulty": "hard",
           "category": "Car"}
    out.append(fixture("evaluate_ap_perfect", "evaluate_ap", inp, {"ap": 100.0, "false_positives": 0}, "trivial",
                       "every ground truth found first"))
    out.append(fixture("evaluate_ap_empty", "evaluate_ap", dict(inp, dets=[]), {"ap": 0.0, "false_negatives": 2},
                       "trivial", "no detections"))
    return out


# ---------------------------------------------------------------- depth metrics

def metrics(pred, gt):
    pred, gt = np.asarray(pred, float), np.asarray(gt, float)
    d = np.log(pred) - np.log(gt)
    return {"silog": float(100 * math.sqrt(max(np.mean(d ** 2) - np.mean(d) ** 2, 0.0))),
            "abs_rel": float(100 * np.mean(np.abs(pred - gt) / gt)),
            "sq_rel": float(100 * np.mean((pred - gt) ** 2 / gt)),
            "irmse": float(1000 * math.sqrt(np.mean((1 / pred - 1 / gt) ** 2))), "count": len(pred)}


def depth_metric_fixtures():
    out = []
    pred, gt = [5.3, 12.1, 30.5, 8.2, 44.0], [5.0, 12.5, 29.0, 8.0, 41.0]
    out.append(fixture("depth_errors_mixed", "depth_errors", {"pred": pred, "gt": gt}, metrics(pred, gt), "derived",
                       "numpy evaluation of the metric definitions"))
    out.append(fixture("depth_errors_perfect", "depth_errors", {"pred": gt, "gt": gt},
                       {"silog": 0.0, "abs_rel": 0.0, "sq_rel": 0.0, "irmse": 0.0}, "trivial", "zero residuals"))
    out.append(fixture("depth_errors_doubled", "depth_errors", {"pred": [2 * g for g in gt], "gt": gt},
                       {"abs_rel": 100.0}, "trivial", "pred = 2 gt"))
    out.append(fixture("depth_errors_length_mismatch", "depth_errors", {"pred": [1.0], "gt": [1.0, 2.0]},
                       {"error": "input"}, "trivial", "length mismatch"))
    samples = [[4.5, 5.0, 5.0], [9.0, 9.5, 9.5], [15.0, 14.0, 14.0], [27.0, 25.0, 25.0], [36.0, 39.0, 39.0],
               [60.0, 55.0, 55.0]]
    ranges = [[0, 10], [0, 20], [0, 30], [0, 40]]
    exp = []
    for lo, hi in ranges:
        sel = [s for s in samples if lo <= s[2] < hi]
        exp.append(metrics([s[0] for s in sel], [s[1] for s in sel]))
    out.append(fixture("bucketed_depth_errors_cumulative", "bucketed_depth_errors",
                       {"samples": samples, "ranges": ranges}, exp, "derived", "numpy per half-open range"))
    out.append(fixture("bucketed_depth_errors_empty_bucket", "bucketed_depth_errors",
                       {"samples": samples[:1], "ranges": [[10, 20]]}, [{"count": 0}], "trivial", "no sample in range"))
    return out


# ---------------------------------------------------------------- losses

def loss_fixtures():
    out = []
    p, y, a, b = sp.symbols("p y a b", real=True)
    pos = -(1 - p) ** a * sp.log(p)
    neg = -(1 - y) ** b * p ** a * sp.log(1 - p)
    for i, (pv, yv) in enumerate([(0.5, 1.0), (0.9, 1.0), (0.2, 0.0), (0.3, 0.6), (0.05, 0.95)]):
        e = pos if yv == 1.0 else neg
        subs = {p: pv, y: yv, a: 2, b: 4}
        out.append(fixture(f"focal_variant_{i}", "focal_variant", {"p": pv, "y": yv, "alpha": 2.0, "beta": 4.0},
                           {"value": float(e.subs(subs)), "grad": [float(sp.diff(e, p).subs(subs))]}, "derived",
                           "sympy symbolic derivative", 1e-12))
    out.append(fixture("focal_variant_half_positive", "focal_variant", {"p": 0.5, "y": 1.0},
                       {"value": 0.25 * math.log(2)}, "trivial", "(1/2)^2 ln 2"))
    out.append(fixture("focal_variant_bad_target", "focal_variant", {"p": 0.5, "y": 1.5}, {"error": "domain"},
                       "trivial", "target outside [0, 1]"))
    d, s, g = sp.symbols("d s g", real=True)
    e = sp.sqrt(2) / s * sp.Abs(g - d) + sp.log(s)
    for i, (dv, sv, gv) in enumerate([(19.0, 1.0, 20.0), (25.0, 0.5, 20.0), (10.0, 3.0, 10.7)]):
        subs = {d: dv, s: sv, g: gv}
        out.append(fixture(f"uncertainty_l1_{i}", "uncertainty_l1", {"depth": dv, "sigma": sv, "d_gt": gv},
                           {"value": float(e.subs(subs)),
                            "grad": [float(sp.diff(e, d).subs(subs)), float(sp.diff(e, s).subs(subs))]},
                           "derived", "sympy symbolic derivative", 1e-12))
    out.append(fixture("uncertainty_l1_zero_sigma", "uncertainty_l1", {"depth": 1.0, "sigma": 0.0, "d_gt": 1.0},
                       {"error": "domain"}, "trivial", "sigma must be positive"))
    out.append(fixture("total_loss_unit_weights", "total_loss", {"l_c": 1.0, "l_2d": 2.0, "l_3d": 3.0}, 6.0,
                       "trivial", "unit weights sum the terms"))
    out.append(fixture("total_loss_weighted", "total_loss",
                       {"l_c": 0.5, "l_2d": 1.5, "l_3d": 2.0, "lambda_2d": 2.0, "lambda_3d": 0.5}, 4.5, "trivial",
                       "weighted sum"))
    return out


# ---------------------------------------------------------------- analysis

def misalign_oracle(frames, size=(1242.0, 375.0)):
    buckets = [(0, 10), (10, 20), (20, 40), (40, math.inf)]
    acc = {k: [] for k in range(4)}
    trunc = {k: 0 for k in range(4)}
    for fr in frames:
        for line in fr["labels"]:
            r = parse_label(line)
            if r["category"] == "DontCare":
                continue
            b = box_of(r)
            k = next(i for i, (lo, hi) in enumerate(buckets) if lo <= b["z"] < hi)
            pb = project_box(b, fr["camera"])
            if pb[0] < 0 or pb[1] < 0 or pb[2] > size[0] or pb[3] > size[1]:
                trunc[k] += 1
                continue
            ab = r["bbox"]
            cen = lambda q: ((q[0] + q[2]) / 2, (q[1] + q[3]) / 2, q[2] - q[0], q[3] - q[1])
            ca, cp = cen(ab), cen(pb)
            acc[k].append((iou_2d(ab, pb),) + tuple(abs(x - y) for x, y in zip(ca, cp)))
    rows = []
    for k, (lo, hi) in enumerate(buckets):
        if not acc[k] and not trunc[k]:
            continue
        m = np.mean(acc[k], axis=0) if acc[k] else [0.0] * 5
        rows.append({"range_lo": lo, "range_hi": None if math.isinf(hi) else hi, "count": len(acc[k]),
                     "mean_iou": float(m[0]), "mean_du": float(m[1]), "mean_dv": float(m[2]),
                     "mean_dw": float(m[3]), "mean_dh": float(m[4]), "truncated": trunc[k]})
    return rows


def spread_oracle(frames, hc, Hc, source):
    samples = []
    for fr in frames:
        for line in fr["labels"]:
            r = parse_label(line)
            if r["category"] != "Car":
                continue
            h = (r["bbox"][3] - r["bbox"][1]) if source == "annotated" else (
                lambda q: q[3] - q[1])(project_box(box_of(r), fr["camera"]))
            samples.append((h, r["dims"][0], r["location"][2]))
    rows = []
    for c in hc:
        cells, means = [], []
        for H in Hc:
            ds = [z for h, hh, z in samples
                  if round(h - c, 9) >= -0.5 and round(h - c, 9) < 0.5 and round(hh - H, 9) >= -0.005
                  and round(hh - H, 9) < 0.005]
            cells.append((H, ds))
            if ds:
                means.append(sum(ds) / len(ds))
        def row(label, vals):
            if not vals:
                return {"h": c, "height": label, "count": 0, "max": None, "min": None, "diff": None}
            return {"h": c, "height": label, "count": len(vals), "max": max(vals), "min": min(vals),
                    "diff": max(vals) - min(vals)}
        rows.append(row("avg", means))
        rows.extend(row(H, ds) for H, ds in cells)
    return rows


def analysis_fixtures():
    out = []
    out.append(fixture("generate_scenes_self_consistent", "generate_scenes",
                       {"seed": 42, "n_frames": 100, "boxes_per_frame": 3},
                       {"frames": 100, "labels": 300, "all_visible": True, "max_reprojection_error_px": 0.0},
                       "derived", "every label re-projected from its own 3D box", 1e-6))
    out.append(fixture("generate_scenes_zero", "generate_scenes", {"seed": 1, "n_frames": 0, "boxes_per_frame": 3},
                       {"frames": 0, "labels": 0}, "trivial", "no frames requested"))

    boxes = [dict(CAR_B, z=9.5, x=0.5, y=1.6), dict(CAR_B, z=15.0), dict(CAR_C, z=25.0, x=-2.0), dict(CAR_A)]
    exact = [label_of_box("Car", b, PLAIN, bbox=project_box(b, PLAIN)) for b in boxes]
    # exact labels: bbox printed with two decimals, so IoU is close to but not exactly 1
    frames = [{"labels": exact + [GOLDEN[4]], "camera": PLAIN}]
    out.append(fixture("misalignment_report_rounded", "misalignment_report", {"frames": frames},
                       misalign_oracle(frames), "derived", "shapely IoU against re-projected corners", 1e-9))
    pert = []
    for b in boxes:
        pb = project_box(b, PLAIN)
        if b["z"] < 10:
            cx, cy, w, h = (pb[0] + pb[2]) / 2, (pb[1] + pb[3]) / 2, 1.1 * (pb[2] - pb[0]), 1.1 * (pb[3] - pb[1])
            pb = [cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2]
        pert.append(label_of_box("Car", b, PLAIN, bbox=pb))
    frames_p = [{"labels": pert, "camera": PLAIN}]
    out.append(fixture("misalignment_report_near_perturbed", "misalignment_report", {"frames": frames_p},
                       misalign_oracle(frames_p), "derived", "near boxes enlarged by 10 percent", 1e-9))
    edge = dict(CAR_B, x=-6.5, z=7.0)
    frames_t = [{"labels": [label_of_box("Car", edge, PLAIN, bbox=[0, 100, 50, 300])], "camera": PLAIN}]
    out.append(fixture("misalignment_report_truncated", "misalignment_report", {"frames": frames_t},
                       misalign_oracle(frames_t), "derived", "projected box leaves the image"))
    out.append(fixture("misalignment_report_empty", "misalignment_report", {"frames": []}, [], "trivial",
                       "no frames"))

    rng = np.random.default_rng(3)
    lines = []
    for _ in range(400):
        H = round(float(rng.choice([1.49, 1.50, 1.51, 1.52, 1.6])), 2)
        b = {"w": round(float(rng.uniform(1.5, 1.8)), 2), "h": H, "l": round(float(rng.uniform(3.5, 4.5)), 2),
             "x": round(float(rng.uniform(-5, 5)), 2), "y": round(float(rng.uniform(1.55, 1.8)), 2),
             "z": round(float(rng.uniform(28, 45)), 2), "ry": round(float(rng.uniform(-3.1, 3.1)), 2)}
        lines.append(label_of_box("Car", b, PLAIN))
    frames_s = [{"labels": lines, "camera": PLAIN}]
    hc, Hc = [30.0, 35.0], [1.49, 1.50, 1.51, 1.52]
    for src in ("projected", "annotated"):
        out.append(fixture(f"depth_spread_table_{src}", "depth_spread_table",
                           {"frames": frames_s, "h_centers": hc, "height_centers": Hc, "source": src},
                           spread_oracle(frames_s, hc, Hc, src), "derived", "brute-force group-by"))
    single = [{"labels": [label_of_box("Car", dict(CAR_B, h=1.51, z=40.0), PLAIN)], "camera": PLAIN}]
    out.append(fixture("depth_spread_table_single", "depth_spread_table",
                       {"frames": single, "h_centers": [30.0], "height_centers": [1.51], "source": "annotated",
                        "h_tolerance": 100.0},
                       [{"height": "avg", "diff": 0.0}, {"height": 1.51, "count": 1, "diff": 0.0}], "trivial",
                       "single-sample cell"))

    out.append(fixture("sensitivity_sweep_degenerate", "sensitivity_sweep",
                       {"betas": [0.0], "yaws": [0.0], "footprints": [[0.0, 0.0]]},
                       {"spread": 0.0, "failed": 0}, "trivial", "single grid point"))
    out.append(fixture("sensitivity_sweep_car", "sensitivity_sweep", {},
                       {"spread_exceeds_5m": True, "failed": 0}, "paper",
                       "published claim: two cars with equal 2D and 3D heights differ in depth by more than 5 m"))
    betas, yaws, fps = [-0.03, 0.02, 0.08], [-2.0, 0.0, 0.6, 1.5], [[1.63, 3.88]]
    zs = []
    for (w, l) in fps:
        for be in betas:
            for ry in yaws:
                zs.append(depth_by_roots("paired", 30.0, be, 1.51, dz_max(w, l, ry), 721.5377))
    out.append(fixture("sensitivity_sweep_small_grid", "sensitivity_sweep",
                       {"betas": betas, "yaws": yaws, "footprints": fps, "model": "paired"},
                       {"cells": len(zs), "min": min(zs), "max": max(zs), "spread": max(zs) - min(zs)}, "derived",
                       "root-finding inverse per grid cell", 1e-8))
    return out


# ---------------------------------------------------------------- cli and fixtures

def g6(x):
    if x == 0:
        return "0"
    s = "%.6g" % x
    return s


def cli_fixtures():
    out = []
    boxes = [CAR_B, dict(CAR_C, z=20.0), dict(CAR_A, y=1.9)]
    labels = "".join(label_of_box("Car", b, KITTI) + "\n" for b in boxes) + GOLDEN[4] + "\n"
    cam = calib_camera(CALIB)
    rows = ["frame,index,category,h,beta,height,dz,z_label,z_geo,status"]
    for i, line in enumerate(labels.splitlines()):
        r = parse_label(line)
        if r["category"] == "DontCare":
            continue
        b = box_of(r)
        lt = project_box(b, cam)
        h = lt[3] - lt[1]
        _, v0 = project([b["x"], b["y"], b["z"]], cam)
        beta = math.atan2(v0 - cam["c_v"], cam["f_v"])
        dz = dz_max(b["w"], b["l"], b["ry"])
        z = depth_by_roots("paired", h, beta, b["h"], dz, cam["f_v"])
        rows.append(",".join(["000007", str(i), "Car"] + [g6(v) for v in (h, beta, b["h"], dz, b["z"], z)] + ["ok"]))
    out.append(fixture("run_recover_depth", "run",
                       {"args": ["recover-depth", "--labels", "{dir}/000007.txt", "--calib", "{dir}/calib.txt",
                                 "--formula", "full", "--out", "{dir}/o.csv"],
                        "files": {"000007.txt": labels, "calib.txt": CALIB}},
                       {"exit": 0, "files": {"o.csv": "\n".join(rows) + "\n"}}, "derived",
                       "end-to-end: corner projection and root-finding inverse, six significant digits"))
    gts = "".join(label_of_box("Car", b, KITTI) + "\n" for b in boxes)
    dets = "".join(label_of_box("Car", b, KITTI, score=0.9 - 0.1 * i) + "\n" for i, b in enumerate(boxes))
    out.append(fixture("run_eval_ap_perfect", "run",
                       {"args": ["eval-ap", "--dets", "{dir}/d.txt", "--gts", "{dir}/g.txt", "--recall", "40",
                                 "--iou", "0.7", "--task", "3d"],
                        "files": {"d.txt": dets, "g.txt": gts}},
                       {"exit": 0}, "trivial", "detections equal to ground truth"))
    out.append(fixture("run_unknown_flag", "run", {"args": ["eval-ap", "--bogus"]}, {"exit": 1, "stdout": ""},
                       "trivial", "usage error"))
    out.append(fixture("run_help", "run", {"args": ["recover-depth", "--help"]}, {"exit": 0}, "trivial",
                       "help exits cleanly"))
    out.append(fixture("run_missing_input", "run",
                       {"args": ["project", "--labels", "{dir}/nope.txt", "--calib", "{dir}/nope.txt"]},
                       {"exit": 1, "stdout": ""}, "trivial", "unreadable input"))
    good = fixture("inner_ok", "total_loss", {"l_c": 1.0, "l_2d": 1.0, "l_3d": 1.0}, 3.0, "trivial", "sum")
    corrupt = fixture("inner_corrupted", "total_loss", {"l_c": 1.0, "l_2d": 1.0, "l_3d": 1.0}, 4.0, "trivial", "sum")
    out.append(fixture("verify_fixtures_detects_corruption", "verify_fixtures", {"fixtures": [good, corrupt]},
                       {"passed": 1, "failed": ["inner_corrupted"]}, "trivial", "one altered expectation"))
    out.append(fixture("verify_fixtures_missing_dir", "verify_fixtures", {"missing_dir": True}, {"error": "config"},
                       "trivial", "absent directory"))
    return out


def main():
    os.makedirs(OUT, exist_ok=True)
    sets = {
        "camera": camera_fixtures(),
        "geometry": geometry_fixtures(),
        "depth": depth_fixtures(),
        "kitti": kitti_fixtures(),
        "eval": eval_fixtures(),
        "depth_metrics": depth_metric_fixtures(),
        "losses": loss_fixtures(),
        "analysis": analysis_fixtures(),
        "cli": cli_fixtures(),
    }
    total = 0
    for name, fx in sets.items():
        with open(os.path.join(OUT, name + ".json"), "w") as fh:
            json.dump(fx, fh, indent=1, allow_nan=False)
            fh.write("\n")
        total += len(fx)
    print(f"wrote {total} fixtures", file=sys.stderr)


if __name__ == "__main__":
    main()
