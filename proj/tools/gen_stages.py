#!/usr/bin/env python3
"""Regenerates the bundled stages/stage_<n>.json files.

Layouts are deterministic (fixed per-stage seeds). Targets follow the default
progression: goals (grocery, treat, disinfect, crowd) = (5, 3, 4, 3) at stage 1,
each +1 per stage; vaccine_target = 2 * stage; strain_level = stage.
"""
import json
import math
import random
import sys
from pathlib import Path

WIDTH, HEIGHT = 40, 30
SPAWNS = [(19, 14), (20, 14), (19, 15), (20, 15)]
CENTER = (20.0, 15.0)

# Per-stage knobs: wall segment count, wall segment length range, camps.
STAGE_LAYOUT = {
    1: dict(segments=10, seg_len=(2, 4), camps=[(6, 6), (33, 23), (20, 4), (20, 25)]),
    2: dict(segments=14, seg_len=(2, 4), camps=[(6, 23), (33, 6), (10, 15), (30, 15)]),
    3: dict(segments=18, seg_len=(2, 5), camps=[(8, 8), (31, 21), (8, 21), (31, 8)]),
    4: dict(segments=22, seg_len=(3, 5), camps=[(5, 15), (34, 15), (20, 5), (20, 24)]),
}


def build(stage: int) -> dict:
    rng = random.Random(1000 + stage)
    layout = STAGE_LAYOUT[stage]
    reserved = set(SPAWNS)
    for cx, cy in SPAWNS:
        for dx in (-2, -1, 0, 1, 2):
            for dy in (-2, -1, 0, 1, 2):
                reserved.add((cx + dx, cy + dy))
    for cx, cy in layout["camps"]:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                reserved.add((cx + dx, cy + dy))

    walls = set()
    while len(walls) < layout["segments"] * 3:
        x, y = rng.randrange(2, WIDTH - 2), rng.randrange(2, HEIGHT - 2)
        length = rng.randint(*layout["seg_len"])
        horizontal = rng.random() < 0.5
        seg = [(x + i, y) if horizontal else (x, y + i) for i in range(length)]
        if any(c in reserved or not (1 <= c[0] < WIDTH - 1 and 1 <= c[1] < HEIGHT - 1) for c in seg):
            continue
        # keep a one-cell gap around every segment so nothing gets boxed in
        halo = {(cx + dx, cy + dy) for cx, cy in seg for dx in (-1, 0, 1) for dy in (-1, 0, 1)}
        if halo & walls:
            continue
        walls.update(seg)

    taken = set(walls) | set(SPAWNS) | set(layout["camps"])

    def free_cell(min_dist=3.0):
        while True:
            c = (rng.randrange(1, WIDTH - 1), rng.randrange(1, HEIGHT - 1))
            if c in taken:
                continue
            if math.dist((c[0] + 0.5, c[1] + 0.5), CENTER) < min_dist:
                continue
            taken.add(c)
            return c

    grocery, treat, disinfect, crowd = 5 + stage - 1, 3 + stage - 1, 4 + stage - 1, 3 + stage - 1
    vaccine_target = 2 * stage

    pickups = []

    def place(kind, n, min_dist=3.0):
        for _ in range(n):
            x, y = free_cell(min_dist)
            pickups.append({"kind": kind, "x": x, "y": y})

    place("vaccine_part", vaccine_target + 2)
    place("grocery", grocery + 2)
    place("medicine_refill", 3)
    place("disinfectant_refill", 3)
    place("health_vitamin", 4)
    place("mask", 6)
    place("sanitizer", 4)

    viruses = []
    for _ in range(3 + stage):
        x, y = free_cell(9.0)
        viruses.append({"x": x, "y": y, "strain": stage})
    if stage > 1:
        for _ in range(2):
            x, y = free_cell(9.0)
            viruses.append({"x": x, "y": y, "strain": stage - 1})

    crowds = [list(free_cell(6.0)) for _ in range(crowd + 1)]
    civilians = [list(free_cell(4.0)) for _ in range(treat + 2)]

    return {
        "stage_index": stage,
        "strain_level": stage,
        "vaccine_target": vaccine_target,
        "goals": {"grocery": grocery, "treat": treat, "disinfect": disinfect, "crowd": crowd},
        "grid": {"width": WIDTH, "height": HEIGHT},
        "walls": [list(c) for c in sorted(walls)],
        "spawns": [list(c) for c in SPAWNS],
        "camps": [list(c) for c in layout["camps"]],
        "pickups": pickups,
        "viruses": viruses,
        "crowds": crowds,
        "civilians": civilians,
    }


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "stages"
    out.mkdir(parents=True, exist_ok=True)
    for stage in range(1, 5):
        doc = build(stage)
        body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v, separators=(',', ':'))}" for k, v in doc.items())
        (out / f"stage_{stage}.json").write_text("{\n" + body + "\n}\n")


if __name__ == "__main__":
    main()
