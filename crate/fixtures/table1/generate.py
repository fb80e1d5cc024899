"""Regenerates the Office- and Music-shaped statistics fixtures.

User, item and interaction counts and the per-modality missing counts follow
the published dataset statistics; which items miss a modality is arbitrary
but deterministic. Run from this directory: python3 generate.py
"""
import os

SHAPES = {
    # name: users, items, interactions, visual missing, textual missing
    "office": (4905, 2420, 53258, [], 674),
    "music": (5541, 3568, 64706, [0, 1784], 1114),
}


def spread(count, items):
    return [k * items // count for k in range(count)]


for name, (users, items, total, visual, textual) in SHAPES.items():
    os.makedirs(name, exist_ok=True)
    with open(os.path.join(name, "interactions.tsv"), "w") as f:
        for k in range(total):
            u, j = k % users, k // users
            f.write(f"U{u:05d}\tI{(u + 97 * j) % items:05d}\n")
    with open(os.path.join(name, "mask_visual.txt"), "w") as f:
        f.writelines(f"{i}\n" for i in visual)
    missing = spread(textual, items)
    assert set(visual) <= set(missing)
    with open(os.path.join(name, "mask_textual.txt"), "w") as f:
        f.writelines(f"{i}\n" for i in missing)
