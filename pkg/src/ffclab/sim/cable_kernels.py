"""Numba kernels for the cable substep.

Scalar-loop implementations of the same math as the reference helpers in
``cable.py``; one fused kernel advances positions, velocities, frames and
angular velocities in place.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _quat_rotate(q, v):
    w, x, y, z = q[0], q[1], q[2], q[3]
    ux, uy, uz = x, y, z
    # t = 2 u x v
    tx = 2.0 * (uy * v[2] - uz * v[1])
    ty = 2.0 * (uz * v[0] - ux * v[2])
    tz = 2.0 * (ux * v[1] - uy * v[0])
    out = np.empty(3)
    out[0] = v[0] + w * tx + (uy * tz - uz * ty)
    out[1] = v[1] + w * ty + (uz * tx - ux * tz)
    out[2] = v[2] + w * tz + (ux * ty - uy * tx)
    return out


@njit(cache=True)
def _quat_mul(a, b):
    out = np.empty(4)
    out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
    out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1]
    out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]
    return out


@njit(cache=True)
def _push_out(point, lo, hi, radius, shift):
    """Minimum translation out of an inflated AABB, written into shift."""
    shift[:] = 0.0
    best_axis = -1
    best_depth = 1e30
    best_dir = 0.0
    for a in range(3):
        lo_a = lo[a] - radius
        hi_a = hi[a] + radius
        if point[a] <= lo_a or point[a] >= hi_a:
            return False
        d_lo = point[a] - lo_a
        d_hi = hi_a - point[a]
        if d_lo < best_depth:
            best_depth = d_lo
            best_axis = a
            best_dir = -1.0
        if d_hi < best_depth:
            best_depth = d_hi
            best_axis = a
            best_dir = 1.0
    shift[best_axis] = best_dir * best_depth
    return True


@njit(cache=True)
def _bend_forces(pos, vel, ee_x, link_length, k_bend, c_bend, f):
    """Accumulate bending spring-damper forces into f."""
    n = pos.shape[0]
    a = np.empty(3)
    b = np.empty(3)
    da = np.empty(3)
    db = np.empty(3)
    for j in range(n - 1):
        if j == 0:
            for t in range(3):
                a[t] = ee_x[t] * link_length
        else:
            for t in range(3):
                a[t] = pos[j, t] - pos[j - 1, t]
        for t in range(3):
            b[t] = pos[j + 1, t] - pos[j, t]
        na = np.sqrt(a[0] ** 2 + a[1] ** 2 + a[2] ** 2)
        nb = np.sqrt(b[0] ** 2 + b[1] ** 2 + b[2] ** 2)
        if na < 1e-12 or nb < 1e-12:
            continue
        c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb)
        cx = (a[1] * b[2] - a[2] * b[1]) / (na * nb)
        cy = (a[2] * b[0] - a[0] * b[2]) / (na * nb)
        cz = (a[0] * b[1] - a[1] * b[0]) / (na * nb)
        s = np.sqrt(cx * cx + cy * cy + cz * cz)
        theta = np.arctan2(s, c)
        if s < 1e-10:
            continue
        for t in range(3):
            da[t] = -(b[t] / nb - c * a[t] / na) / (na * s)
            db[t] = -(a[t] / na - c * b[t] / nb) / (nb * s)
        # theta_dot = sum over involved points of grad . velocity
        theta_dot = 0.0
        if j == 0:
            for t in range(3):
                theta_dot += db[t] * vel[1, t]
        else:
            for t in range(3):
                theta_dot += (-da[t]) * vel[j - 1, t]
                theta_dot += (da[t] - db[t]) * vel[j, t]
                theta_dot += db[t] * vel[j + 1, t]
        moment = k_bend * theta + c_bend * theta_dot
        if j == 0:
            for t in range(3):
                f[1, t] -= moment * db[t]
        else:
            for t in range(3):
                f[j - 1, t] -= moment * (-da[t])
                f[j, t] -= moment * (da[t] - db[t])
                f[j + 1, t] -= moment * db[t]


@njit(cache=True)
def _bend_energy(pos, ee_x, link_length, k_bend):
    n = pos.shape[0]
    total = 0.0
    a = np.empty(3)
    b = np.empty(3)
    for j in range(n - 1):
        if j == 0:
            for t in range(3):
                a[t] = ee_x[t] * link_length
        else:
            for t in range(3):
                a[t] = pos[j, t] - pos[j - 1, t]
        for t in range(3):
            b[t] = pos[j + 1, t] - pos[j, t]
        na = np.sqrt(a[0] ** 2 + a[1] ** 2 + a[2] ** 2)
        nb = np.sqrt(b[0] ** 2 + b[1] ** 2 + b[2] ** 2)
        if na < 1e-12 or nb < 1e-12:
            continue
        c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb)
        cx = (a[1] * b[2] - a[2] * b[1]) / (na * nb)
        cy = (a[2] * b[0] - a[0] * b[2]) / (na * nb)
        cz = (a[0] * b[1] - a[1] * b[0]) / (na * nb)
        s = np.sqrt(cx * cx + cy * cy + cz * cz)
        theta = np.arctan2(s, c)
        total += 0.5 * k_bend * theta * theta
    return total


@njit(cache=True)
def _project(pos, boxes, radius, link_length, iterations):
    n = pos.shape[0]
    nb = boxes.shape[0]
    shift = np.empty(3)
    tip_end = np.empty(3)
    for _ in range(iterations):
        # contacts: table plane + receptacle sub-boxes, centers then tip end
        for i in range(1, n):
            if pos[i, 2] < radius:
                pos[i, 2] = radius
            for bb in range(nb):
                if _push_out(pos[i], boxes[bb, 0], boxes[bb, 1], radius, shift):
                    for t in range(3):
                        pos[i, t] += shift[t]
        dx = pos[n - 1, 0] - pos[n - 2, 0]
        dy = pos[n - 1, 1] - pos[n - 2, 1]
        dz = pos[n - 1, 2] - pos[n - 2, 2]
        norm = np.sqrt(dx * dx + dy * dy + dz * dz)
        if norm > 1e-12:
            half = 0.5 * link_length / norm
            tip_end[0] = pos[n - 1, 0] + half * dx
            tip_end[1] = pos[n - 1, 1] + half * dy
            tip_end[2] = pos[n - 1, 2] + half * dz
            if tip_end[2] < radius:
                pos[n - 1, 2] += radius - tip_end[2]
            for bb in range(nb):
                if _push_out(tip_end, boxes[bb, 0], boxes[bb, 1], radius, shift):
                    for t in range(3):
                        pos[n - 1, t] += shift[t]
        _distance_sweeps(pos, link_length)
    # Distance-only polish: contacts in the last iteration can leave the
    # chain slightly stretched; sweep until the drift bound holds.
    for _ in range(20):
        worst = 0.0
        for j in range(n - 1):
            ddx = pos[j + 1, 0] - pos[j, 0]
            ddy = pos[j + 1, 1] - pos[j, 1]
            ddz = pos[j + 1, 2] - pos[j, 2]
            err = abs(np.sqrt(ddx * ddx + ddy * ddy + ddz * ddz) - link_length)
            if err > worst:
                worst = err
        if worst < 2e-7:
            break
        _distance_sweeps(pos, link_length)


@njit(cache=True)
def _distance_sweeps(pos, link_length):
    """Forward then backward Gauss-Seidel sweeps over distance constraints."""
    n = pos.shape[0]
    for sweep in range(2):
        for jj in range(n - 1):
            j = jj if sweep == 0 else n - 2 - jj
            ddx = pos[j + 1, 0] - pos[j, 0]
            ddy = pos[j + 1, 1] - pos[j, 1]
            ddz = pos[j + 1, 2] - pos[j, 2]
            dist = np.sqrt(ddx * ddx + ddy * ddy + ddz * ddz)
            if dist < 1e-12:
                continue
            scale = (dist - link_length) / dist
            if j == 0:
                pos[1, 0] -= scale * ddx
                pos[1, 1] -= scale * ddy
                pos[1, 2] -= scale * ddz
            else:
                pos[j, 0] += 0.5 * scale * ddx
                pos[j, 1] += 0.5 * scale * ddy
                pos[j, 2] += 0.5 * scale * ddz
                pos[j + 1, 0] -= 0.5 * scale * ddx
                pos[j + 1, 1] -= 0.5 * scale * ddy
                pos[j + 1, 2] -= 0.5 * scale * ddz


@njit(cache=True)
def _update_frames(pos, quat, angvel, old_quat, ee_quat, ee_x, dt):
    """Segment-aligned frames and finite-difference angular velocities."""
    n = pos.shape[0]
    d = np.empty(3)
    axis = np.empty(3)
    r = np.empty(4)
    for i in range(n):
        if i == 0:
            for t in range(4):
                quat[0, t] = ee_quat[t]
        else:
            for t in range(3):
                d[t] = pos[i, t] - pos[i - 1, t]
            norm = np.sqrt(d[0] ** 2 + d[1] ** 2 + d[2] ** 2)
            if norm < 1e-12:
                for t in range(4):
                    quat[i, t] = ee_quat[t]
            else:
                for t in range(3):
                    d[t] /= norm
                axis[0] = ee_x[1] * d[2] - ee_x[2] * d[1]
                axis[1] = ee_x[2] * d[0] - ee_x[0] * d[2]
                axis[2] = ee_x[0] * d[1] - ee_x[1] * d[0]
                s = np.sqrt(axis[0] ** 2 + axis[1] ** 2 + axis[2] ** 2)
                c = ee_x[0] * d[0] + ee_x[1] * d[1] + ee_x[2] * d[2]
                if s < 1e-12:
                    if c > 0.0:
                        r[0], r[1], r[2], r[3] = 1.0, 0.0, 0.0, 0.0
                    else:
                        # antiparallel: rotate pi about any perpendicular
                        px = -ee_x[1]
                        py = ee_x[0]
                        pz = 0.0
                        pn = np.sqrt(px * px + py * py)
                        if pn < 1e-9:
                            px, py, pz, pn = 0.0, 1.0, 0.0, 1.0
                        r[0] = 0.0
                        r[1] = px / pn
                        r[2] = py / pn
                        r[3] = pz / pn
                else:
                    angle = np.arctan2(s, c)
                    half = 0.5 * angle
                    sh = np.sin(half) / s
                    r[0] = np.cos(half)
                    r[1] = axis[0] * sh
                    r[2] = axis[1] * sh
                    r[3] = axis[2] * sh
                q = _quat_mul(r, ee_quat)
                qn = np.sqrt(q[0] ** 2 + q[1] ** 2 + q[2] ** 2 + q[3] ** 2)
                for t in range(4):
                    quat[i, t] = q[t] / qn
        # incremental rotation -> angular velocity
        conj = np.empty(4)
        conj[0] = old_quat[i, 0]
        conj[1] = -old_quat[i, 1]
        conj[2] = -old_quat[i, 2]
        conj[3] = -old_quat[i, 3]
        dq = _quat_mul(quat[i], conj)
        if dq[0] < 0.0:
            for t in range(4):
                dq[t] = -dq[t]
        w = dq[0]
        if w > 1.0:
            w = 1.0
        angle = 2.0 * np.arccos(w)
        an = np.sqrt(dq[1] ** 2 + dq[2] ** 2 + dq[3] ** 2)
        if an < 1e-12 or angle < 1e-12:
            angvel[i, 0] = 0.0
            angvel[i, 1] = 0.0
            angvel[i, 2] = 0.0
        else:
            scale = angle / (an * dt)
            angvel[i, 0] = dq[1] * scale
            angvel[i, 1] = dq[2] * scale
            angvel[i, 2] = dq[3] * scale


@njit(cache=True)
def substep_kernel(pos, vel, quat, angvel, ee_pos, ee_quat, boxes, radius,
                   link_length, mass, gravity, k_bend, c_bend, drag_rate,
                   iterations, dt):
    n = pos.shape[0]
    ee_x = _quat_rotate(ee_quat, np.array([1.0, 0.0, 0.0]))

    # weld link 0
    for t in range(3):
        pos[0, t] = ee_pos[t] + 0.5 * link_length * ee_x[t]
        vel[0, t] = 0.0

    f = np.zeros((n, 3))
    for i in range(1, n):
        f[i, 2] -= mass * gravity
        for t in range(3):
            f[i, t] -= mass * drag_rate * vel[i, t]
    _bend_forces(pos, vel, ee_x, link_length, k_bend, c_bend, f)

    prev = pos.copy()
    for i in range(1, n):
        for t in range(3):
            vel[i, t] += dt * f[i, t] / mass
            pos[i, t] += dt * vel[i, t]

    _project(pos, boxes, radius, link_length, iterations)

    for i in range(1, n):
        for t in range(3):
            vel[i, t] = (pos[i, t] - prev[i, t]) / dt

    old_quat = quat.copy()
    _update_frames(pos, quat, angvel, old_quat, ee_quat, ee_x, dt)


@njit(cache=True)
def action_kernel(pos, vel, quat, angvel, path_pos, path_quat, boxes, radius,
                  link_length, mass, gravity, k_bend, c_bend, drag_rate,
                  iterations, dt):
    """Run all substeps of one action along a precomputed EE path."""
    for s in range(path_pos.shape[0]):
        substep_kernel(pos, vel, quat, angvel, path_pos[s], path_quat[s],
                       boxes, radius, link_length, mass, gravity, k_bend,
                       c_bend, drag_rate, iterations, dt)
