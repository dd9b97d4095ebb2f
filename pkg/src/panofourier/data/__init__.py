from .dataset import (
    IGNORE_LABEL,
    Batch,
    Sample,
    class_weights,
    load_sample,
    load_split,
    make_batch,
    panorama_input,
    read_manifest,
    write_dataset,
)
from .synthetic import CLASS_NAMES, Box, SceneSpec, generate_samples, random_scene, render_scene, surface_distance
