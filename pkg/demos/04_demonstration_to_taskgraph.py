"""
From camera frames to a task graph
==================================

A demonstration is a stream of top-down height/color frames of both
plates. Keyframe detection keeps only stable moments (a hand over the
plate never survives), and each keyframe pair is explained as exactly
one brick moving from storage to assembly. The learned graph reproduces
the scripted build field for field, even with per-pixel sensor noise.
"""

import random

from brickworks.demogen import random_script, render_script
from brickworks.learner import learn
from brickworks.perception import detect_scene_keyframes
from brickworks.taskgraph import serialize
from brickworks.world import Catalog

catalog = Catalog.default()
rng = random.Random(7)

script, storage = random_script(rng, catalog, dims=(16, 16, 8), n_bricks=5)
print(f"scripted build: {len(script)} bricks")

frames = render_script(
    script,
    storage,
    resolution=4,
    stability_window=3,
    junk_frames=2,       # hand-occluded frames between stable periods
    noise_fraction=0.1,  # corrupt 10% of each cell's pixels
    seed=42,
)
print(f"rendered {len(frames)} frames (stable bursts + occlusions + noise)")

keyframes = detect_scene_keyframes(frames, k=3)
print(f"detected {len(keyframes)} keyframes (occluded frames dropped)")

learned = learn(keyframes, catalog, plate_height=8)
assert learned == script
print("learned graph equals the script, field for field\n")
print(serialize(learned))
