import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import panofourier
from panofourier.data import generate_samples, make_batch, write_dataset
from panofourier.data.image_io import read_pfm, read_png
from panofourier.write import read_ply, read_training_log

TESTS = Path(__file__).parent
SMALL = {"extractor_widths": (4, 8, 8, 8, 8, 8), "block_width": 8, "branch_width": 4}


def small_trainer(out_dir, samples=2, **settings) -> panofourier.JointTrainer:
    settings.setdefault("batch_size", 2)
    trainer = panofourier.JointTrainer(
        model_config=panofourier.ModelConfig(**SMALL),
        optimizer_settings=panofourier.OptimizerSettings(learning_rate=1e-3),
        settings=panofourier.Settings(out_dir=str(out_dir), **settings),
    )
    trainer.load_dataset(synthetic_count=samples, synthetic_seed=1)
    return trainer


def test_from_json_minimal():
    trainer = panofourier.JointTrainer.from_json(TESTS / "config_train_minimal.json")
    assert trainer.model_config.extractor_widths == (4, 8, 8, 8, 8, 8)
    assert trainer.model_config.height == 64
    assert trainer.settings.mode == "joint"
    assert trainer.loss_weights.alpha == (9.0, 14.0, 0.01, 5.0)
    assert len(trainer.train_samples) == 2
    assert trainer.val_samples == []


def test_from_json_non_defaults():
    trainer = panofourier.JointTrainer.from_json(TESTS / "config_train_non_defaults.json")
    with open(TESTS / "config_train_non_defaults.json") as f:
        config = json.load(f)
    written = trainer.to_dict()
    for section in ("ModelConfig", "LossWeights", "OptimizerSettings", "Settings"):
        for key, value in config[section].items():
            assert written[section][key] == value, f"{section}.{key}"
    assert [s.sample_id for s in trainer.val_samples] == ["synthetic_val_00000"]
    assert trainer.checkpoint_path == Path("tests_outputs/non_defaults/depth_model.fdsn")


def test_from_json_without_loading_data():
    trainer = panofourier.JointTrainer.from_json(TESTS / "config_train_minimal.json", load_data=False)
    assert trainer.train_samples == []


@pytest.mark.parametrize(
    "config, message",
    [
        ({"Options": {}}, "Invalid key 'Options'"),
        ({"ModelConfig": {"depth": 3}}, r"Invalid field\(s\) \['depth'\] in section 'ModelConfig'"),
        ({"Settings": {"epoch": 3}}, "section 'Settings'"),
        ({"load_dataset": {"synthetic": 1}}, "section 'load_dataset'"),
    ],
)
def test_from_json_rejects_invalid_sections(tmp_path, config, message):
    filename = tmp_path / "config.json"
    filename.write_text(json.dumps(config))
    with pytest.raises(ValueError, match=message):
        panofourier.JointTrainer.from_json(filename)


def test_from_json_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        panofourier.JointTrainer.from_json(tmp_path / "absent.json")


def test_config_types_are_checked():
    with pytest.raises(TypeError):
        panofourier.JointTrainer(model_config={"height": 64})
    with pytest.raises(TypeError):
        panofourier.JointTrainer(settings="fast")
    with pytest.raises(ValueError):
        panofourier.Settings(mode="both")
    with pytest.raises(ValueError):
        panofourier.ModelConfig(height=96, width=192)
    with pytest.raises(ValueError):
        panofourier.ModelConfig(height=64, width=64)


def test_load_dataset_errors(tmp_path):
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    with pytest.raises(ValueError, match="no training samples"):
        trainer.load_dataset()
    with pytest.raises(FileNotFoundError):
        trainer.load_dataset(path=str(tmp_path / "absent"))
    with pytest.raises(ValueError):
        trainer.load_dataset(synthetic_count=-1)
    with pytest.raises(TypeError):
        trainer.load_dataset(synthetic_count=1.5)

    write_dataset(tmp_path / "large", "train", generate_samples(1, 128))
    with pytest.raises(ValueError, match="model expects 128x64"):
        trainer.load_dataset(path=str(tmp_path / "large"))


def test_load_dataset_from_disk(tmp_path):
    write_dataset(tmp_path, "train", generate_samples(2, 64, seed=2, prefix="disk"))
    write_dataset(tmp_path, "val", generate_samples(1, 64, seed=3, prefix="held"))
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    train, val = trainer.load_dataset(path=str(tmp_path), val_split="val", synthetic_count=1)
    assert [s.sample_id for s in train] == ["disk_00000", "disk_00001", "synthetic_train_00000"]
    assert [s.sample_id for s in val] == ["held_00000"]


def test_joint_training_smoke(tmp_path):
    trainer = small_trainer(tmp_path)
    report = trainer.train()

    records = read_training_log(tmp_path / "train_log.jsonl")
    steps = [r for r in records if r["type"] == "step"]
    assert len(steps) == 1
    for name in ("l_seg", "l_dep", "l_mar", "l_obj", "l_total", "c1", "c2"):
        assert math.isfinite(steps[0][name])
    assert steps[0]["l_mar"] > 0.0
    assert [r["epoch"] for r in records if r["type"] == "epoch"] == [0]

    assert trainer.checkpoint_path.is_file()
    assert trainer.checkpoint_path.with_suffix(".json").is_file()
    assert json.loads((tmp_path / "run_config.json").read_text())["Settings"]["out_dir"] == str(tmp_path)
    assert panofourier.MetricsReport.from_json(tmp_path / "best_metrics.json").to_dict() == report.to_dict()
    assert report.class_names[2] == "floor"

    run_log = (tmp_path / "panofourier.log").read_text()
    assert "End of training phase" in run_log
    assert '"l_total"' in run_log


def test_train_without_samples(tmp_path):
    trainer = panofourier.JointTrainer(settings=panofourier.Settings(out_dir=str(tmp_path)))
    with pytest.raises(ValueError, match="load_dataset"):
        trainer.train()


def branch_values(model, prefix):
    return {name: p.data.copy() for name, p in model.named_parameters() if name.startswith(prefix)}


@pytest.mark.parametrize("mode, frozen, trained", [("depth_only", "semantic.", "depth."), ("semantic_only", "depth.", "semantic.")])
def test_task_specific_mode_freezes_the_other_branch(tmp_path, mode, frozen, trained):
    trainer = small_trainer(tmp_path, mode=mode)
    model = trainer.build_model()
    before_frozen = branch_values(model, frozen)
    before_trained = branch_values(model, trained)
    weights = panofourier.data.class_weights(trainer.train_samples, 7)
    bundle = trainer.train_step(make_batch(trainer.train_samples), weights)

    for name, value in branch_values(model, frozen).items():
        np.testing.assert_array_equal(value, before_frozen[name], err_msg=name)
    assert any(not np.array_equal(v, before_trained[n]) for n, v in branch_values(model, trained).items())
    values = bundle.as_dict()
    assert values["l_mar"] == 0.0 and values["l_obj"] == 0.0
    assert (values["l_seg"] == 0.0) == (mode == "depth_only")


def test_disabled_loss_terms_are_zero(tmp_path):
    trainer = small_trainer(tmp_path)
    trainer.loss_weights.use_margin = False
    trainer.build_model()
    weights = panofourier.data.class_weights(trainer.train_samples, 7)
    values = trainer.train_step(make_batch(trainer.train_samples), weights).as_dict()
    assert values["l_mar"] == 0.0
    assert values["l_obj"] > 0.0


def test_training_is_deterministic(tmp_path):
    first = small_trainer(tmp_path / "first", seed=4)
    second = small_trainer(tmp_path / "second", seed=4)
    first.train()
    second.train()
    assert first.checkpoint_path.read_bytes() == second.checkpoint_path.read_bytes()


def test_checkpoint_reproduces_validation_metrics(tmp_path):
    trainer = small_trainer(tmp_path)
    report = trainer.train()
    restored = panofourier.JointTrainer(settings=panofourier.Settings(out_dir=str(tmp_path / "restored")))
    restored.load_checkpoint(trainer.checkpoint_path)
    assert restored.model_config.to_dict() == trainer.model_config.to_dict()
    assert restored.evaluate(trainer.train_samples).to_dict() == report.to_dict()


def test_oracle_evaluation():
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    report = trainer.evaluate(generate_samples(2, 64, seed=8), oracle=True)
    assert report.mre == 0.0
    assert report.mae == 0.0
    assert report.delta1 == 1.0
    assert report.miou == 1.0
    assert report.macc == 1.0
    with pytest.raises(ValueError):
        trainer.evaluate([])


def test_predict_shapes():
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    depth, labels = trainer.predict(make_batch(generate_samples(2, 64)).input)
    assert depth.shape == (2, 64, 128)
    assert labels.shape == (2, 64, 128)
    assert depth.min() >= 0.0
    assert labels.max() < 7


def test_infer_writes_products(tmp_path):
    trainer = panofourier.JointTrainer(
        model_config=panofourier.ModelConfig(**SMALL), settings=panofourier.Settings(cell_size=0.5)
    )
    model = trainer.build_model()
    model.depth.project.weight.data[...] = 0.0
    model.depth.project.bias.data[...] = 2.0
    rgb = generate_samples(1, 64, seed=6)[0].rgb

    written = trainer.infer(rgb, tmp_path / "out", reconstruct=True)
    assert sorted(written) == ["depth", "free_floor", "labels", "obstacles", "room_structure", "semantic_cloud"]
    np.testing.assert_allclose(read_pfm(written["depth"]), 2.0)
    labels = read_png(written["labels"])
    assert labels.shape == (64, 128)
    cloud = read_ply(written["semantic_cloud"])
    assert len(cloud) == 64 * 128
    np.testing.assert_allclose(np.linalg.norm(cloud.points, axis=1), 2.0, atol=1e-5)
    structural = np.isin(labels, (1, 2, 3)).sum()
    assert len(read_ply(written["room_structure"])) == structural
    assert read_png(written["obstacles"]).dtype == np.uint8


def test_infer_without_reconstruction(tmp_path):
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    written = trainer.infer(generate_samples(1, 64)[0].rgb, tmp_path)
    assert sorted(written) == ["depth", "labels"]
    with pytest.raises(ValueError):
        trainer.infer(np.zeros((64, 100, 3), dtype=np.uint8), tmp_path)


def test_infer_at_another_extent_keeps_the_training_extent(tmp_path):
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    trainer.build_model()
    written = trainer.infer(generate_samples(1, 128, seed=2)[0].rgb, tmp_path)
    assert read_png(written["labels"]).shape == (128, 256)
    assert trainer.model.config.height == 64

    report = trainer.evaluate(generate_samples(1, 64, seed=3))
    assert report.depth_pixels == 64 * 128


def test_benchmark(tmp_path):
    trainer = panofourier.JointTrainer(model_config=panofourier.ModelConfig(**SMALL))
    report = trainer.benchmark(iterations=10)
    assert report["extent"] == "128x64"
    assert report["iterations"] == 10
    assert report["mean_seconds"] > 0.0
    assert report["fps"] == pytest.approx(1.0 / report["mean_seconds"])

    wide = trainer.benchmark(height=128, iterations=10)
    assert wide["extent"] == "256x128"
    assert trainer.model.config.height == 64

    with pytest.raises(ValueError):
        trainer.benchmark(iterations=5)
    with pytest.raises(ValueError):
        trainer.benchmark(height=96)


def test_copy_overrides(tmp_path):
    trainer = small_trainer(tmp_path)
    copy = trainer.copy(mode="depth_only", use_object=False)
    assert copy.settings.mode == "depth_only"
    assert not copy.loss_weights.use_object
    assert trainer.settings.mode == "joint"
    assert copy.train_samples is trainer.train_samples
    with pytest.raises(ValueError, match="neither"):
        trainer.copy(height=128)


def test_mode_ablation_table(tmp_path):
    trainer = small_trainer(tmp_path)
    rows = trainer.run_ablation("mode")
    assert [row["name"] for row in rows] == ["depth_only", "semantic_only", "joint"]
    assert rows[0]["mIoU"] is None and rows[0]["MRE"] is not None
    assert rows[1]["MRE"] is None and rows[1]["mAcc"] is not None
    assert all(rows[2][column] is not None for column in ("MRE", "MAE", "mIoU", "mAcc"))
    table = json.loads((tmp_path / "ablation_mode.json").read_text())
    assert table == {"kind": "mode", "rows": rows}
    assert (tmp_path / "ablation_mode" / "joint" / "model.fdsn").is_file()


def test_loss_ablation_table(tmp_path):
    rows = small_trainer(tmp_path).run_ablation("loss")
    assert [(row["name"], row["use_margin"], row["use_object"]) for row in rows] == [
        ("seg_dep", False, False),
        ("seg_dep_mar", True, False),
        ("seg_dep_obj", False, True),
        ("seg_dep_mar_obj", True, True),
    ]
    assert all(row["mode"] == "joint" for row in rows)
    with pytest.raises(ValueError):
        small_trainer(tmp_path).run_ablation("width")


@pytest.mark.skipif(not os.getenv("PANOFOURIER_SLOW_TESTS"), reason="set PANOFOURIER_SLOW_TESTS to run")
def test_eight_panoramas_overfit(tmp_path):
    trainer = panofourier.JointTrainer(
        model_config=panofourier.ModelConfig(
            height=64,
            width=128,
            num_classes=7,
            extractor_widths=(8, 16, 16, 16, 16, 16),
            block_width=16,
            branch_width=16,
        ),
        optimizer_settings=panofourier.OptimizerSettings(
            learning_rate=2e-3, decay_rate=1.0, step_factor=0.5, step_period=300
        ),
        settings=panofourier.Settings(out_dir=str(tmp_path), epochs=600, batch_size=8, augment=False),
    )
    trainer.load_dataset(synthetic_count=8, synthetic_seed=5)
    report = trainer.train()

    steps = [r for r in read_training_log(tmp_path / "train_log.jsonl") if r["type"] == "step"]
    for record in steps:
        assert all(math.isfinite(record[key]) for key in ("l_seg", "l_dep", "l_mar", "l_obj", "l_total"))
    total = [r["l_total"] for r in steps]
    assert np.mean(total[-5:]) <= 0.1 * total[0]
    assert report.mre < 0.05
    assert report.miou > 0.9

