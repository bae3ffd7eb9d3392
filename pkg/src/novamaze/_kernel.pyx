# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled episode kernel.

Line-for-line transliteration of sim.py's reference semantics (sense, one
synchronous network pass, kinematics, capsule collision with slide). Keep the
operation order and constants in lockstep with sim.py: the test suite asserts
bit-identical trajectories between the two implementations, and the build
compiles with -ffp-contract=off so C arithmetic matches CPython's.
"""

from libc.math cimport atan2, cos, exp, fmod, sin, sqrt
from libc.stdlib cimport free, malloc

cdef double PI = 3.141592653589793
cdef double QUARTER_PI = PI / 4.0
cdef double HALF_PI = PI / 2.0
cdef double TWO_PI = PI * 2.0
cdef double SQ2 = 0.7071067811865476
cdef double TOUCH_EPS = 1e-9
cdef int SLIDE_ITERATIONS = 4


cdef inline double steep_sigmoid(double z):
    cdef double x = -4.9 * z
    if x > 700.0:
        return -0.5
    return 1.0 / (1.0 + exp(x)) - 0.5


cdef inline int capsule_contact(
    double px, double py, double dx, double dy,
    double x1, double y1, double x2, double y2, double r,
    double* t_out, double* nx_out, double* ny_out,
):
    """Writes (t, nx, ny) for the first contact; t = 2.0 means unconstrained."""
    cdef double ex = x2 - x1
    cdef double ey = y2 - y1
    cdef double length_sq = ex * ex + ey * ey
    cdef double qx = px - x1
    cdef double qy = py - y1
    cdef double u, cx, cy, wx, wy, dist_sq, touch, dist, nx, ny
    cdef double best, bnx, bny, inv_len, lnx, lny, s0, sd, target, t, hx, hy, uu
    cdef double a, ox, oy, b, c, disc, cx0, cy0
    cdef int endpoint

    if length_sq == 0.0:
        u = 0.0
    else:
        u = (qx * ex + qy * ey) / length_sq
        if u < 0.0:
            u = 0.0
        elif u > 1.0:
            u = 1.0
    cx = x1 + u * ex
    cy = y1 + u * ey
    wx = px - cx
    wy = py - cy
    dist_sq = wx * wx + wy * wy
    touch = r + TOUCH_EPS
    if dist_sq <= touch * touch:
        dist = sqrt(dist_sq)
        if dist == 0.0:
            t_out[0] = 2.0
            nx_out[0] = 0.0
            ny_out[0] = 0.0
            return 0
        nx = wx / dist
        ny = wy / dist
        if dx * nx + dy * ny < 0.0:
            t_out[0] = 0.0
            nx_out[0] = nx
            ny_out[0] = ny
            return 0
        t_out[0] = 2.0
        nx_out[0] = 0.0
        ny_out[0] = 0.0
        return 0

    best = 2.0
    bnx = 0.0
    bny = 0.0
    if length_sq > 0.0:
        inv_len = 1.0 / sqrt(length_sq)
        lnx = -ey * inv_len
        lny = ex * inv_len
        s0 = qx * lnx + qy * lny
        sd = dx * lnx + dy * lny
        if sd != 0.0:
            if s0 > 0.0:
                target = r
            else:
                target = -r
            t = (target - s0) / sd
            if 0.0 <= t < 1.0:
                hx = px + dx * t
                hy = py + dy * t
                uu = ((hx - x1) * ex + (hy - y1) * ey) / length_sq
                if 0.0 <= uu <= 1.0 and t < best:
                    best = t
                    if s0 > 0.0:
                        bnx = lnx
                        bny = lny
                    else:
                        bnx = -lnx
                        bny = -lny
    a = dx * dx + dy * dy
    if a != 0.0:
        for endpoint in range(2):
            if endpoint == 0:
                cx0 = x1
                cy0 = y1
            else:
                cx0 = x2
                cy0 = y2
            ox = px - cx0
            oy = py - cy0
            b = ox * dx + oy * dy
            c = ox * ox + oy * oy - r * r
            disc = b * b - a * c
            if disc <= 0.0:
                continue
            t = (-b - sqrt(disc)) / a
            if 0.0 <= t < 1.0 and t < best:
                best = t
                bnx = (px + dx * t - cx0) / r
                bny = (py + dy * t - cy0) / r
    t_out[0] = best
    nx_out[0] = bnx
    ny_out[0] = bny
    return 0


def run_episode(
    int n_nodes,
    const int[::1] link_src,
    const int[::1] link_dst,
    const double[::1] link_weight,
    const double[:, ::1] walls,
    double sx, double sy, double sheading,
    double gx, double gy,
    int max_steps, double solve_radius, double robot_radius,
    double rf_range, double turn_gain, double vel_gain,
    double max_av, double max_lv,
    double[:, ::1] out,
):
    cdef int n_links = link_src.shape[0]
    cdef int n_walls = walls.shape[0]
    cdef double* acts = <double*> malloc(3 * n_nodes * sizeof(double))
    cdef double* sums = acts + n_nodes
    cdef double* prev_acts = acts + 2 * n_nodes
    if acts == NULL:
        raise MemoryError()

    cdef double rf_cos[6]
    cdef double rf_sin[6]
    rf_cos[0] = 0.0;  rf_sin[0] = -1.0
    rf_cos[1] = SQ2;  rf_sin[1] = -SQ2
    rf_cos[2] = 1.0;  rf_sin[2] = 0.0
    rf_cos[3] = SQ2;  rf_sin[3] = SQ2
    rf_cos[4] = 0.0;  rf_sin[4] = 1.0
    rf_cos[5] = -1.0; rf_sin[5] = 0.0

    cdef double sensors[10]
    cdef double x = sx
    cdef double y = sy
    cdef double heading = sheading
    cdef double lv = 0.0
    cdef double av = 0.0
    cdef double solve_sq = solve_radius * solve_radius
    cdef double px, py, pheading, plv, pav
    cdef bint have_prev = 0
    cdef bint acts_equal
    cdef int i, j, l, ray, w, idx, it, q
    cdef double ch, sh, dxr, dyr, best, x1w, y1w, x2w, y2w
    cdef double ex, ey, denom, qx, qy, t, u, rel, shifted
    cdef double turn, velocity, dx, dy, rx, ry, dot, nx, ny, cnx, cny, ct
    cdef double ddx, ddy

    for j in range(n_nodes):
        acts[j] = 0.0
        prev_acts[j] = 0.0

    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = heading
    out[0, 3] = 0.0
    out[0, 4] = 0.0

    try:
        for i in range(1, max_steps + 1):
            # --- sense ---
            ch = cos(heading)
            sh = sin(heading)
            for ray in range(6):
                dxr = ch * rf_cos[ray] - sh * rf_sin[ray]
                dyr = sh * rf_cos[ray] + ch * rf_sin[ray]
                best = rf_range
                for w in range(n_walls):
                    x1w = walls[w, 0]
                    y1w = walls[w, 1]
                    x2w = walls[w, 2]
                    y2w = walls[w, 3]
                    ex = x2w - x1w
                    ey = y2w - y1w
                    denom = dxr * ey - dyr * ex
                    if denom == 0.0:
                        continue
                    qx = x1w - x
                    qy = y1w - y
                    t = (qx * ey - qy * ex) / denom
                    u = (qx * dyr - qy * dxr) / denom
                    if t >= 0.0 and 0.0 <= u <= 1.0 and t < best:
                        best = t
                sensors[ray] = best / rf_range
            rel = atan2(gy - y, gx - x) - heading
            shifted = fmod(rel + QUARTER_PI, TWO_PI)
            if shifted < 0.0:
                shifted += TWO_PI
            idx = <int> (shifted / HALF_PI)
            if idx > 3:
                idx = 3
            for q in range(4):
                if q == idx:
                    sensors[6 + q] = 1.0
                else:
                    sensors[6 + q] = 0.0

            # --- activate (one synchronous pass) ---
            acts[0] = 0.5
            for j in range(10):
                acts[j + 1] = sensors[j] - 0.5
            for j in range(n_nodes):
                sums[j] = 0.0
            for l in range(n_links):
                sums[link_dst[l]] += link_weight[l] * acts[link_src[l]]
            for j in range(11, n_nodes):
                acts[j] = steep_sigmoid(sums[j])
            turn = acts[11]
            velocity = acts[12]

            # --- step ---
            av = av + turn * turn_gain
            if av > max_av:
                av = max_av
            elif av < -max_av:
                av = -max_av
            lv = lv + velocity * vel_gain
            if lv > max_lv:
                lv = max_lv
            elif lv < -max_lv:
                lv = -max_lv
            px = x
            py = y
            pheading = heading
            heading = heading + av
            ch = cos(heading)
            sh = sin(heading)
            dx = lv * ch
            dy = lv * sh

            # --- resolve motion (truncate + slide) ---
            for it in range(SLIDE_ITERATIONS):
                if dx == 0.0 and dy == 0.0:
                    break
                best = 2.0
                nx = 0.0
                ny = 0.0
                for w in range(n_walls):
                    capsule_contact(
                        x, y, dx, dy,
                        walls[w, 0], walls[w, 1], walls[w, 2], walls[w, 3],
                        robot_radius, &ct, &cnx, &cny,
                    )
                    if ct < best:
                        best = ct
                        nx = cnx
                        ny = cny
                if best >= 1.0:
                    x += dx
                    y += dy
                    break
                x += dx * best
                y += dy * best
                rx = dx * (1.0 - best)
                ry = dy * (1.0 - best)
                dot = rx * nx + ry * ny
                if dot < 0.0:
                    rx -= nx * dot
                    ry -= ny * dot
                dx = rx
                dy = ry

            out[i, 0] = x
            out[i, 1] = y
            out[i, 2] = heading
            out[i, 3] = lv
            out[i, 4] = av

            ddx = x - gx
            ddy = y - gy
            if ddx * ddx + ddy * ddy <= solve_sq:
                return i + 1, True, i

            # --- fixed-point fast-forward ---
            if have_prev and x == out[i - 1, 0] and y == out[i - 1, 1] \
                    and heading == out[i - 1, 2] and lv == out[i - 1, 3] \
                    and av == out[i - 1, 4]:
                acts_equal = 1
                for j in range(n_nodes):
                    if acts[j] != prev_acts[j]:
                        acts_equal = 0
                        break
                if acts_equal:
                    for j in range(i + 1, max_steps + 1):
                        out[j, 0] = x
                        out[j, 1] = y
                        out[j, 2] = heading
                        out[j, 3] = lv
                        out[j, 4] = av
                    return max_steps + 1, False, -1
            for j in range(n_nodes):
                prev_acts[j] = acts[j]
            have_prev = 1

        return max_steps + 1, False, -1
    finally:
        free(acts)
