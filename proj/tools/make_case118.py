#!/usr/bin/env python3
"""Generate data/case118.m, a synthetic 118-bus transmission case.

Three zones joined by tie lines: zone A (buses 1-40) has cheap surplus
generation, zone B (41-80) is balanced, zone C (81-118) is import-heavy and
ends in a load pocket (116-118) served by weak feeds and one expensive local
unit. Branch ratings are left at zero, so studies are
expected to derive them from nominal flows (network.auto_rating).

Deterministic: no randomness, fixed formatting. Rerunning reproduces the file
byte for byte.
"""

import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data", "case118.m")

branches = []  # (from, to, r, x, rateA)


def add(f, t, x, rate=0.0):
    branches.append((f, t, round(x / 5.0, 5), round(x, 5), rate))


# zone rings
for i in range(1, 40):
    add(i, i + 1, 0.024 + 0.012 * (i % 5) / 5.0)
add(40, 1, 0.024)
for i in range(41, 80):
    add(i, i + 1, 0.026 + 0.012 * (i % 5) / 5.0)
add(80, 41, 0.026)
for i in range(81, 118):
    if (i, i + 1) == (115, 116):
        add(i, i + 1, 0.020)  # pocket feed, strong side
    elif (i, i + 1) in ((116, 117), (117, 118)):
        add(i, i + 1, 0.050)
    else:
        add(i, i + 1, 0.030 + 0.012 * (i % 5) / 5.0)
add(118, 81, 0.080)  # pocket feed, long seam

# long chords
for j, (f, t) in enumerate([(1, 21), (5, 25), (10, 30), (15, 35)]):
    add(f, t, 0.09 + 0.01 * j)
for j, (f, t) in enumerate([(41, 61), (45, 65), (50, 70), (55, 75)]):
    add(f, t, 0.09 + 0.01 * j)
for j, (f, t) in enumerate([(81, 100), (85, 104), (90, 109)]):
    add(f, t, 0.10 + 0.01 * j)

# short chords
for j, f in enumerate(range(2, 40, 4)):
    add(f, f + 2, 0.055 + 0.005 * (j % 4))
for j, f in enumerate(range(42, 80, 4)):
    add(f, f + 2, 0.055 + 0.005 * (j % 4))
for j, f in enumerate(range(82, 112, 4)):
    add(f, f + 2, 0.060 + 0.005 * (j % 4))
add(97, 99, 0.065)
add(112, 114, 0.065)

# inner meshes
for j, (f, t) in enumerate([(3, 23), (7, 27), (12, 32), (17, 37)]):
    add(f, t, 0.13 + 0.01 * j)
for j, (f, t) in enumerate([(43, 63), (47, 67), (52, 72), (57, 77)]):
    add(f, t, 0.13 + 0.01 * j)
for j, (f, t) in enumerate([(83, 102), (87, 106), (92, 111), (96, 113)]):
    add(f, t, 0.13 + 0.01 * j)

# zone ties
add(20, 41, 0.030)
add(20, 41, 0.032)
add(40, 60, 0.035)
add(10, 50, 0.040)
add(30, 45, 0.038)
add(60, 81, 0.030)
add(60, 81, 0.032)
add(80, 100, 0.035)
add(70, 90, 0.040)
add(75, 95, 0.038)
add(30, 110, 0.045)
add(1, 81, 0.050)
add(15, 95, 0.048)
add(35, 105, 0.046)

# pocket side feed
add(114, 116, 0.060)

assert len(branches) == 186, len(branches)

# (bus, Pd)
loads = [
    (2, 80), (5, 75), (7, 70), (10, 85), (13, 90), (16, 60), (20, 95),
    (23, 65), (27, 70), (30, 85), (33, 75), (36, 80), (39, 70), (40, 60),
    (41, 95), (43, 90), (46, 100), (49, 85), (51, 110), (54, 95), (57, 80),
    (59, 105), (62, 90), (65, 85), (68, 95), (70, 100), (73, 80), (76, 95),
    (79, 90), (80, 90),
    (82, 100), (84, 95), (87, 110), (89, 105), (91, 90), (93, 115),
    (96, 100), (99, 95), (101, 120), (105, 105), (107, 85), (109, 110),
    (111, 95), (113, 100), (115, 107),
    (116, 60), (117, 55), (118, 50),
]
assert sum(p for _, p in loads) == 4242

# (bus, Pmax, cost $/MWh)
gens = [
    (4, 500, 14.0), (12, 450, 15.0), (18, 500, 16.0), (26, 450, 15.5),
    (32, 400, 17.0), (38, 500, 14.5), (8, 400, 16.5), (22, 350, 18.0),
    (15, 250, 18.5),
    (44, 450, 26.0), (52, 400, 27.0), (63, 350, 28.0), (71, 250, 30.0),
    (77, 150, 32.0),
    (85, 300, 38.0), (94, 250, 40.0), (103, 200, 42.0), (110, 140, 44.0),
    (117, 110, 60.0),
]
assert len(gens) == 19
assert sum(p for _, p, _ in gens) == 6400

load_at = dict(loads)
gen_buses = {b for b, _, _ in gens}


def zone(b):
    return 1 if b <= 40 else (2 if b <= 80 else 3)


lines = []
lines.append("function mpc = case118")
lines.append("% Synthetic 118-bus three-zone system, generated by"
             " tools/make_case118.py.")
lines.append("% Branch ratings are zero; derive them from nominal flows.")
lines.append("")
lines.append("mpc.version = '2';")
lines.append("mpc.baseMVA = 100;")
lines.append("")
lines.append("%% bus data")
lines.append("%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone"
             "\tVmax\tVmin")
lines.append("mpc.bus = [")
for b in range(1, 119):
    btype = 3 if b == 1 else (2 if b in gen_buses else 1)
    pd = load_at.get(b, 0)
    qd = round(0.25 * pd, 1)
    lines.append(f"\t{b}\t{btype}\t{pd:.1f}\t{qd:.1f}\t0\t0\t{zone(b)}"
                 f"\t1.0\t0\t138\t1\t1.06\t0.94;")
lines.append("];")
lines.append("")
lines.append("%% generator data")
lines.append("%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin")
lines.append("mpc.gen = [")
for b, pmax, _ in gens:
    pg = round(pmax * 4242.0 / 6400.0, 1)
    lines.append(f"\t{b}\t{pg:.1f}\t0.0\t{pmax / 2:.1f}\t{-pmax / 2:.1f}"
                 f"\t1.0\t100\t1\t{pmax:.1f}\t0.0;")
lines.append("];")
lines.append("")
lines.append("%% branch data")
lines.append("%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle"
             "\tstatus\tangmin\tangmax")
lines.append("mpc.branch = [")
for f, t, r, x, rate in branches:
    lines.append(f"\t{f}\t{t}\t{r:.5f}\t{x:.5f}\t0.0\t{rate:.0f}\t0\t0\t0\t0"
                 f"\t1\t-360\t360;")
lines.append("];")
lines.append("")
lines.append("%% generator cost data")
lines.append("%\tmodel\tstartup\tshutdown\tn\tc1\tc0")
lines.append("mpc.gencost = [")
for _, _, c1 in gens:
    lines.append(f"\t2\t0\t0\t2\t{c1:.1f}\t0;")
lines.append("];")
lines.append("")

with open(OUT, "w") as fh:
    fh.write("\n".join(lines))
print(f"wrote {os.path.normpath(OUT)}: 118 buses, {len(branches)} branches,"
      f" {len(gens)} generators, {sum(p for _, p in loads)} MW load")
