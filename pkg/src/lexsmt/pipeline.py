"""File-based experiment pipeline: stages, manifests and the result matrix.

Every stage reads documented text files and writes its own, plus a JSON
manifest with content hashes of inputs and outputs and the settings used.
Artifacts of an experiment live under `<output_dir>/<experiment name>/`.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import align, decoder, lexicon, lm, metrics, mert, phrases
from .corpus import (
    CleaningRuleSet,
    ParallelCorpus,
    SCRIPT_RANGES,
    clean,
    corpus_stats,
    load_corpus,
    save_corpus,
    tokenize,
    write_flag_report,
    _read_lines,
)
from .decoder import DecoderConfig, WeightVector
from .lexicon import Category

__all__ = [
    "STAGES",
    "MissingArtifact",
    "ConfigError",
    "ExperimentConfig",
    "load_configs",
    "run_stage",
    "run_experiment",
    "run_matrix",
    "write_synthetic_setup",
    "LADDER",
    "SHORT_LADDER",
]

log = logging.getLogger(__name__)

STAGES = ("clean", "augment", "align", "phrases", "lm", "tune", "translate", "evaluate")
RESOURCES = tuple(c.value for c in Category)
PATH_KEYS = (
    "train_source", "train_target", "dev_source", "dev_target", "test_source", "test_target",
    "synset", "function_word", "verb_phrase", "suffixes", "output_dir",
)

DEFAULTS: Dict[str, Dict[str, str]] = {
    "clean": {
        "max_length_ratio": "3.0", "max_tokens": "80", "drop_empty": "true",
        "drop_duplicates": "true", "source_script": "", "target_script": "",
    },
    "augment": {"suffix_side": "target", "min_stem_length": "1", "repeat": "1"},
    "align": {"iterations": "10", "use_null": "true", "heuristic": "grow_diag"},
    "phrases": {"max_len": "7"},
    "lm": {"order": "3", "method": "add_k", "k": "0.1", "weights": "0.1 0.3 0.6", "unk_threshold": "0"},
    "decoder": {"beam_size": "100", "distortion_limit": "6", "max_phrase_len": "7", "top_k": "20"},
    "tune": {
        "nbest": "100", "outer_iters": "10", "random_directions": "8", "seed": "0",
        "min_improvement": "1e-4",
        # log-probability and distortion weights below zero only fit dev noise
        "nonnegative": "phrase_fwd lex_fwd phrase_bwd lex_bwd lm distortion",
    },
    "weights": {k: repr(v) for k, v in WeightVector().as_dict().items()},
}

# The six systems of the experiment ladder, each adding to the one before.
LADDER: Tuple[Tuple[str, Dict[str, str]], ...] = (
    ("uncleaned", {"cleaning": "off", "suffix_split": "off", "resources": ""}),
    ("cleaned", {"cleaning": "on", "suffix_split": "off", "resources": ""}),
    ("suffix_split", {"cleaning": "on", "suffix_split": "on", "resources": ""}),
    ("wordnet", {"cleaning": "on", "suffix_split": "on", "resources": "synset"}),
    ("function_words", {"cleaning": "on", "suffix_split": "on", "resources": "synset function_word"}),
    ("verb_phrases", {"cleaning": "on", "suffix_split": "on",
                      "resources": "synset function_word verb_phrase"}),
)

# Noise, cleaning and lexicon injection alone: the three rungs whose ordering
# the acceptance suite checks.
SHORT_LADDER: Tuple[Tuple[str, Dict[str, str]], ...] = (
    LADDER[0],
    LADDER[1],
    ("lexicon", {"cleaning": "on", "suffix_split": "off",
                 "resources": "synset function_word verb_phrase"}),
)


class ConfigError(ValueError):
    pass


class MissingArtifact(FileNotFoundError):
    def __init__(self, path, stage):
        self.path, self.stage = path, stage
        super().__init__(f"missing {path}; run the '{stage}' stage first")


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("on", "true", "yes", "1"):
        return True
    if v in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"expected on/off, got {value!r}")


@dataclass
class ExperimentConfig:
    name: str
    cleaning: bool = True
    suffix_split: bool = False
    resources: Tuple[str, ...] = ()
    tuning: bool = True
    paths: Dict[str, Optional[Path]] = field(default_factory=dict)
    settings: Dict[str, Dict[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        for r in self.resources:
            if r not in RESOURCES:
                raise ConfigError(f"{self.name}: unknown resource {r!r}; choose from {RESOURCES}")
            path = self.paths.get(r)
            if path is None or not Path(path).exists():
                raise ConfigError(f"{self.name}: resource {r!r} enabled but file {path} does not exist")
        if self.suffix_split and self.paths.get("suffixes") is not None and not Path(self.paths["suffixes"]).exists():
            raise ConfigError(f"{self.name}: suffix file {self.paths['suffixes']} does not exist")

    def get(self, section: str, key: str) -> str:
        return self.settings.get(section, {}).get(key, DEFAULTS[section][key])

    @property
    def workdir(self) -> Path:
        if self.paths.get("output_dir") is None:
            raise ConfigError("paths.output_dir is not set")
        return Path(self.paths["output_dir"]) / self.name

    def path(self, key: str) -> Path:
        p = self.paths.get(key)
        if p is None:
            raise ConfigError(f"{self.name}: paths.{key} is not set")
        return Path(p)

    # typed settings

    def cleaning_rules(self) -> CleaningRuleSet:
        ranges = {}
        for side in ("source", "target"):
            names = self.get("clean", f"{side}_script").replace(",", " ").split()
            if names:
                unknown = [n for n in names if n not in SCRIPT_RANGES]
                if unknown:
                    raise ConfigError(f"unknown script names {unknown}; known: {sorted(SCRIPT_RANGES)}")
                ranges[side] = CleaningRuleSet.ranges(*names)
        return CleaningRuleSet(
            max_length_ratio=float(self.get("clean", "max_length_ratio")),
            max_tokens=int(self.get("clean", "max_tokens")),
            allowed_script_ranges=ranges,
            drop_empty=_bool(self.get("clean", "drop_empty")),
            drop_duplicates=_bool(self.get("clean", "drop_duplicates")),
        )

    def suffix_inventory(self) -> lexicon.SuffixInventory:
        min_stem = int(self.get("augment", "min_stem_length"))
        if self.paths.get("suffixes") is None:
            return lexicon.default_suffixes(min_stem)
        return lexicon.load_suffixes(self.paths["suffixes"], min_stem)

    def smoothing(self) -> lm.Smoothing:
        weights = self.get("lm", "weights").split()
        return lm.Smoothing(
            self.get("lm", "method"), float(self.get("lm", "k")),
            tuple(float(w) for w in weights) if weights else None,
        )

    def decoder_config(self) -> DecoderConfig:
        def opt_int(v):
            return None if v.strip().lower() in ("none", "unlimited", "") else int(v)

        return DecoderConfig(
            beam_size=opt_int(self.get("decoder", "beam_size")),
            distortion_limit=opt_int(self.get("decoder", "distortion_limit")),
            max_phrase_len=int(self.get("decoder", "max_phrase_len")),
            top_k=int(self.get("decoder", "top_k")),
        )

    def initial_weights(self) -> WeightVector:
        return WeightVector.from_mapping(
            {k: float(self.get("weights", k)) for k in decoder.FEATURES}
        )

    def fingerprint(self) -> Dict[str, object]:
        return {
            "name": self.name, "cleaning": self.cleaning, "suffix_split": self.suffix_split,
            "resources": list(self.resources), "tuning": self.tuning,
            "settings": {s: {k: self.get(s, k) for k in DEFAULTS[s]} for s in sorted(DEFAULTS)},
        }


def load_configs(path, overrides: Sequence[str] = ()) -> List[ExperimentConfig]:
    """Parse a config file into one ExperimentConfig per `[experiment NAME]` section.

    Shared sections (`[paths]`, `[clean]`, `[align]`, ...) apply to every
    experiment; keys inside an experiment section of the form
    `section.key = value` override them for that experiment only.
    `overrides` are `section.key=value` strings applied to all experiments.
    Relative paths are resolved against the config file's directory.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    base = Path(path).resolve().parent

    shared: Dict[str, Dict[str, str]] = {
        s: dict(parser[s]) for s in parser.sections() if not s.startswith("experiment")
    }
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot:
            raise ConfigError(f"override {item!r} is not section.key=value")
        shared.setdefault(section, {})[name] = value.strip()

    for s in shared:
        if s != "paths" and s not in DEFAULTS:
            raise ConfigError(f"unknown config section [{s}]")
        for k in shared[s]:
            if s == "paths" and k not in PATH_KEYS or s != "paths" and k not in DEFAULTS[s]:
                raise ConfigError(f"unknown key {k!r} in [{s}]")

    def resolve(p: str) -> Optional[Path]:
        p = p.strip()
        if not p:
            return None
        q = Path(p)
        return q if q.is_absolute() else base / q

    exp_sections = [s for s in parser.sections() if s.startswith("experiment")]
    if not exp_sections:
        raise ConfigError(f"{path}: no [experiment NAME] section")
    configs = []
    for sec in exp_sections:
        name = sec[len("experiment"):].strip() or "default"
        body = dict(parser[sec])
        settings = {s: dict(v) for s, v in shared.items() if s != "paths"}
        paths = {k: resolve(v) for k, v in shared.get("paths", {}).items()}
        top = {}
        for k, v in body.items():
            if "." in k:
                section, _, key = k.partition(".")
                if section == "paths":
                    paths[key] = resolve(v)
                elif section in DEFAULTS and key in DEFAULTS[section]:
                    settings.setdefault(section, {})[key] = v
                else:
                    raise ConfigError(f"[{sec}]: unknown setting {k!r}")
            else:
                top[k] = v
        unknown = set(top) - {"cleaning", "suffix_split", "resources", "tuning"}
        if unknown:
            raise ConfigError(f"[{sec}]: unknown keys {sorted(unknown)}")
        configs.append(
            ExperimentConfig(
                name=name,
                cleaning=_bool(top.get("cleaning", "on")),
                suffix_split=_bool(top.get("suffix_split", "off")),
                resources=tuple(top.get("resources", "").replace(",", " ").split()),
                tuning=_bool(top.get("tuning", "on")),
                paths=paths,
                settings=settings,
            )
        )
    return configs


# --- manifests -------------------------------------------------------------


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _rel(path: Path, root: Path) -> str:
    try:
        return str(Path(path).resolve().relative_to(root.resolve()))
    except ValueError:
        return str(path)


def _write_manifest(cfg: ExperimentConfig, stage: str, inputs: Sequence[Path], outputs: Sequence[Path],
                    extra: Optional[dict] = None) -> Path:
    root = cfg.workdir
    manifest = {
        "stage": stage,
        "experiment": cfg.fingerprint(),
        "inputs": {_rel(p, root): _sha256(p) for p in inputs},
        "outputs": {_rel(p, root): _sha256(p) for p in outputs},
    }
    if extra:
        manifest.update(extra)
    path = root / "manifests" / f"{stage}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return path


# --- artifact layout -------------------------------------------------------


class _Layout:
    def __init__(self, cfg: ExperimentConfig):
        w = cfg.workdir
        self.clean_src = w / "corpus" / "train.clean.src"
        self.clean_tgt = w / "corpus" / "train.clean.tgt"
        self.flags = w / "corpus" / "flags.tsv"
        self.stats = w / "corpus" / "stats.tsv"
        self.aug_src = w / "corpus" / "train.aug.src"
        self.aug_tgt = w / "corpus" / "train.aug.tgt"
        self.t_fwd = w / "model" / "t.fwd"
        self.t_bwd = w / "model" / "t.bwd"
        self.aligned = w / "model" / "aligned.txt"
        self.phrase_table = w / "model" / "phrase-table.txt"
        self.lm_counts = w / "model" / "lm.counts"
        self.lm_arpa = w / "model" / "lm.arpa"
        self.tuned_weights = w / "model" / "weights.tuned"
        self.tune_log = w / "model" / "tune.log"
        self.tune_nbest = w / "model" / "dev.nbest"

    def hyp(self, cfg, variant):
        return cfg.workdir / "output" / f"test.{variant}.hyp"

    def report(self, cfg, variant):
        return cfg.workdir / "eval" / f"{variant}.report.txt"

    def metrics(self, cfg, variant):
        return cfg.workdir / "eval" / f"{variant}.metrics.tsv"


def _need(path: Path, stage: str) -> Path:
    if not Path(path).exists():
        raise MissingArtifact(path, stage)
    return Path(path)


def _load_tokens(path: Path, side: str) -> List[List[str]]:
    return [tokenize(line, side) for line in _read_lines(path)]


def _write_lines(path: Path, token_lists) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for toks in token_lists:
            fh.write(" ".join(toks) + "\n")


class _Models:
    """Trained models of one experiment, read back from disk."""

    def __init__(self, cfg: ExperimentConfig, lay: _Layout):
        self.table = phrases.read_phrase_table(_need(lay.phrase_table, "phrases"))
        self.lm = lm.read_counts(_need(lay.lm_counts, "lm"))
        self.dcfg = cfg.decoder_config()
        self.split_side = cfg.get("augment", "suffix_side") if cfg.suffix_split else None
        self.inv = cfg.suffix_inventory() if cfg.suffix_split else None
        self.inputs = [lay.phrase_table, lay.lm_counts]

    def prepare(self, tokens: Sequence[str]) -> List[str]:
        if self.split_side == "source":
            return [t for tok in tokens for t in lexicon.split_token(tok, self.inv)]
        return list(tokens)

    def finish(self, tokens: Sequence[str]) -> Tuple[str, ...]:
        if self.split_side == "target":
            return tuple(lexicon.join_suffixes(tokens, self.inv))
        return tuple(tokens)

    def translate(self, tokens, weights) -> Tuple[str, ...]:
        return self.finish(decoder.decode(self.prepare(tokens), self.table, self.lm, weights, self.dcfg).target)

    def nbest(self, tokens, weights, n):
        out = decoder.nbest(self.prepare(tokens), self.table, self.lm, weights, self.dcfg, n)
        seen, merged = set(), []
        for t in out:
            t.target = self.finish(t.target)
            if t.target not in seen:
                seen.add(t.target)
                merged.append(t)
        return merged


# --- stages ----------------------------------------------------------------


def _stage_clean(cfg: ExperimentConfig, lay: _Layout, variant: Optional[str]) -> List[Path]:
    src, tgt = cfg.path("train_source"), cfg.path("train_target")
    corpus = load_corpus(src, tgt)
    if cfg.cleaning:
        corpus = clean(corpus, cfg.cleaning_rules())
    lay.clean_src.parent.mkdir(parents=True, exist_ok=True)
    save_corpus(corpus, lay.clean_src, lay.clean_tgt, clean_only=True)
    write_flag_report(corpus, lay.flags)
    stats = corpus_stats(corpus)
    with open(lay.stats, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in stats.as_rows():
            fh.write(f"{k}\t{v}\n")
    outputs = [lay.clean_src, lay.clean_tgt, lay.flags, lay.stats]
    _write_manifest(cfg, "clean", [src, tgt], outputs)
    return outputs


def _stage_augment(cfg, lay, variant):
    corpus = load_corpus(_need(lay.clean_src, "clean"), _need(lay.clean_tgt, "clean"))
    inputs = [lay.clean_src, lay.clean_tgt]
    if cfg.suffix_split:
        corpus = lexicon.split_suffixes(corpus, cfg.suffix_inventory(), cfg.get("augment", "suffix_side"))
        if cfg.paths.get("suffixes") is not None:
            inputs.append(cfg.path("suffixes"))
    for res in cfg.resources:
        path = cfg.path(res)
        inputs.append(path)
        if res == Category.SYNSET.value:
            entries = lexicon.expand_synsets(lexicon.load_synsets(path))
        else:
            entries = lexicon.load_lexicon(path, res)
        corpus = lexicon.inject(corpus, entries, int(cfg.get("augment", "repeat")))
    save_corpus(corpus, lay.aug_src, lay.aug_tgt)
    outputs = [lay.aug_src, lay.aug_tgt]
    _write_manifest(cfg, "augment", inputs, outputs)
    return outputs


def _stage_align(cfg, lay, variant):
    corpus = load_corpus(_need(lay.aug_src, "augment"), _need(lay.aug_tgt, "augment"))
    iters = int(cfg.get("align", "iterations"))
    use_null = _bool(cfg.get("align", "use_null"))
    fwd = align.train_model1(corpus, iters, use_null)
    bwd = align.train_model1(corpus.swapped(), iters, use_null)
    lay.t_fwd.parent.mkdir(parents=True, exist_ok=True)
    align.write_table(fwd.table, lay.t_fwd)
    align.write_table(bwd.table, lay.t_bwd)
    alignments = align.align_corpus(corpus, fwd.table, bwd.table, cfg.get("align", "heuristic"))
    align.write_alignments(alignments, lay.aligned)
    outputs = [lay.t_fwd, lay.t_bwd, lay.aligned]
    _write_manifest(cfg, "align", [lay.aug_src, lay.aug_tgt], outputs, {
        "log_likelihood": {"forward": fwd.log_likelihood, "backward": bwd.log_likelihood},
    })
    return outputs


def _stage_phrases(cfg, lay, variant):
    corpus = load_corpus(_need(lay.aug_src, "augment"), _need(lay.aug_tgt, "augment"))
    fwd = align.read_table(_need(lay.t_fwd, "align"))
    bwd = align.read_table(_need(lay.t_bwd, "align"))
    pairs = corpus.clean_pairs()
    alignments = align.read_alignments(_need(lay.aligned, "align"), pairs)
    extracted = phrases.extract_corpus(corpus, alignments, int(cfg.get("phrases", "max_len")))
    table = phrases.score_table(extracted, fwd, bwd)
    phrases.write_phrase_table(table, lay.phrase_table)
    inputs = [lay.aug_src, lay.aug_tgt, lay.t_fwd, lay.t_bwd, lay.aligned]
    _write_manifest(cfg, "phrases", inputs, [lay.phrase_table])
    return [lay.phrase_table]


def _stage_lm(cfg, lay, variant):
    tgt = _need(lay.aug_tgt, "augment")
    model = lm.train_lm(
        _load_tokens(tgt, "target"), int(cfg.get("lm", "order")), cfg.smoothing(),
        int(cfg.get("lm", "unk_threshold")),
    )
    lay.lm_counts.parent.mkdir(parents=True, exist_ok=True)
    lm.write_counts(model, lay.lm_counts)
    lm.write_arpa(model, lay.lm_arpa)
    outputs = [lay.lm_counts, lay.lm_arpa]
    _write_manifest(cfg, "lm", [tgt], outputs)
    return outputs


def _stage_tune(cfg, lay, variant):
    models = _Models(cfg, lay)
    dev_src, dev_tgt = cfg.path("dev_source"), cfg.path("dev_target")
    dev = load_corpus(dev_src, dev_tgt)
    n = int(cfg.get("tune", "nbest"))
    state = mert.tune(
        [p.source for p in dev], [p.target for p in dev],
        lambda src, w, k: models.nbest(src, w, k),
        cfg.initial_weights(),
        outer_iters=int(cfg.get("tune", "outer_iters")),
        n=n,
        n_random=int(cfg.get("tune", "random_directions")),
        seed=int(cfg.get("tune", "seed")),
        min_improvement=float(cfg.get("tune", "min_improvement")),
        nonnegative=tuple(cfg.get("tune", "nonnegative").split()),
    )
    state.weights.save(lay.tuned_weights)
    mert.write_tuning_log(state, lay.tune_log)
    outputs = [lay.tuned_weights, lay.tune_log]
    _write_manifest(cfg, "tune", models.inputs + [dev_src, dev_tgt], outputs, {
        "stop_reason": state.stop_reason, "failed_sentences": state.failed_sentences,
    })
    return outputs


def _variant(cfg: ExperimentConfig, variant: Optional[str]) -> str:
    variant = variant or ("tuned" if cfg.tuning else "untuned")
    if variant not in ("tuned", "untuned"):
        raise ConfigError(f"variant must be 'tuned' or 'untuned', got {variant!r}")
    return variant


def _stage_translate(cfg, lay, variant):
    variant = _variant(cfg, variant)
    models = _Models(cfg, lay)
    inputs = list(models.inputs)
    if variant == "tuned":
        weights = WeightVector.load(_need(lay.tuned_weights, "tune"))
        inputs.append(lay.tuned_weights)
    else:
        weights = cfg.initial_weights()
    test_src = cfg.path("test_source")
    inputs.append(test_src)
    out, failed = [], 0
    for toks in _load_tokens(test_src, "source"):
        try:
            out.append(models.translate(toks, weights))
        except decoder.DecodingError as exc:
            log.warning("%s", exc)
            failed += 1
            out.append(())
    hyp = lay.hyp(cfg, variant)
    _write_lines(hyp, out)
    _write_manifest(cfg, f"translate.{variant}", inputs, [hyp], {
        "weights": weights.as_dict(), "failed_sentences": failed,
    })
    return [hyp]


def _stage_evaluate(cfg, lay, variant):
    variant = _variant(cfg, variant)
    hyp = _need(lay.hyp(cfg, variant), "translate")
    ref = cfg.path("test_target")
    report = metrics.evaluate_corpus(hyp, ref)
    rep_path, met_path = lay.report(cfg, variant), lay.metrics(cfg, variant)
    rep_path.parent.mkdir(parents=True, exist_ok=True)
    label = "With Tuning" if variant == "tuned" else "Without Tuning"
    rep_path.write_text(metrics.format_table([(cfg.name, label, report)]), encoding="utf-8")
    met_path.write_text(report.dump(), encoding="utf-8")
    _write_manifest(cfg, f"evaluate.{variant}", [hyp, ref], [rep_path, met_path])
    return [rep_path, met_path]


_STAGE_FNS = {
    "clean": _stage_clean,
    "augment": _stage_augment,
    "align": _stage_align,
    "phrases": _stage_phrases,
    "lm": _stage_lm,
    "tune": _stage_tune,
    "translate": _stage_translate,
    "evaluate": _stage_evaluate,
}


def run_stage(stage: str, cfg: ExperimentConfig, variant: Optional[str] = None) -> List[Path]:
    """Run one stage; `variant` picks tuned or untuned weights for translate/evaluate."""
    if stage not in _STAGE_FNS:
        raise ConfigError(f"unknown stage {stage!r}; choose from {STAGES}")
    cfg.workdir.mkdir(parents=True, exist_ok=True)
    log.info("[%s] stage %s", cfg.name, stage)
    return _STAGE_FNS[stage](cfg, _Layout(cfg), variant)


def _read_report(cfg: ExperimentConfig, variant: str) -> metrics.EvalReport:
    lay = _Layout(cfg)
    hyp = lay.hyp(cfg, variant)
    return metrics.evaluate_corpus(hyp, cfg.path("test_target"))


def run_experiment(cfg: ExperimentConfig) -> Dict[str, metrics.EvalReport]:
    """All stages of one configuration, evaluated both without and with tuning."""
    for stage in ("clean", "augment", "align", "phrases", "lm"):
        run_stage(stage, cfg)
    reports = {}
    run_stage("translate", cfg, "untuned")
    run_stage("evaluate", cfg, "untuned")
    reports["untuned"] = _read_report(cfg, "untuned")
    run_stage("tune", cfg)
    run_stage("translate", cfg, "tuned")
    run_stage("evaluate", cfg, "tuned")
    reports["tuned"] = _read_report(cfg, "tuned")
    return reports


@dataclass
class MatrixRow:
    system: str
    tuning: str
    report: Optional[metrics.EvalReport]
    error: str = ""


def run_matrix(configs: Sequence[ExperimentConfig], report_path=None) -> List[MatrixRow]:
    """Run every configuration end to end; one row per (system, tuning state).

    A failing configuration gets rows with the error recorded and does not
    stop the others.
    """
    rows: List[MatrixRow] = []
    for cfg in configs:
        try:
            reps = run_experiment(cfg)
        except Exception as exc:  # recorded in the report, other rows proceed
            log.error("experiment %s failed: %s", cfg.name, exc)
            msg = f"{type(exc).__name__}: {exc}"
            rows.append(MatrixRow(cfg.name, "Without Tuning", None, msg))
            rows.append(MatrixRow(cfg.name, "With Tuning", None, msg))
            continue
        rows.append(MatrixRow(cfg.name, "Without Tuning", reps["untuned"]))
        rows.append(MatrixRow(cfg.name, "With Tuning", reps["tuned"]))
    if report_path is not None:
        write_matrix(rows, report_path)
    return rows


def write_matrix(rows: Sequence[MatrixRow], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = metrics.format_table([(r.system, r.tuning, r.report) for r in rows])
    errors = [f"{r.system} ({r.tuning}): {r.error}" for r in rows if r.error]
    if errors:
        text += "\nFailures:\n" + "\n".join(errors) + "\n"
    path.write_text(text, encoding="utf-8")
    with open(path.with_suffix(".tsv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("system\ttuning\tbleu\tmeteor\tter\terror\n")
        for r in rows:
            if r.report is None:
                fh.write(f"{r.system}\t{r.tuning}\t\t\t\t{r.error}\n")
            else:
                b, m, t = r.report.row()
                fh.write(f"{r.system}\t{r.tuning}\t{b:.4f}\t{m:.4f}\t{t:.4f}\t\n")


# --- synthetic setup -------------------------------------------------------


def write_synthetic_setup(
    directory,
    spec,
    n_train: int = 2000,
    n_dev: int = 100,
    n_test: int = 200,
    noise_rate: float = 0.0,
    ladder: Sequence[Tuple[str, Dict[str, str]]] = LADDER,
    settings: Optional[Dict[str, Dict[str, str]]] = None,
) -> Path:
    """Generate a synthetic corpus plus resources and write a ladder config.

    Held-out words never appear in training; the lexicon files hold the
    ground-truth entries by category. Noise, if any, only hits training.
    Returns the path of the written config file.
    """
    from . import synth

    d = Path(directory)
    (d / "data").mkdir(parents=True, exist_ok=True)
    total = n_train + n_dev + n_test
    # oversample so that removing held-out sentences still leaves enough training data
    gen = synth.generate(spec, total * 3 if spec.oov_fraction else total)
    all_pairs = gen.corpus
    pairs = list(all_pairs.pairs)
    random.Random(spec.seed).shuffle(pairs)
    test = ParallelCorpus(pairs[:n_test])
    dev = ParallelCorpus(pairs[n_test:n_test + n_dev])
    rest = ParallelCorpus(pairs[n_test + n_dev:])
    train = synth.exclude_heldout(rest, gen.heldout)
    train = ParallelCorpus(train.pairs[:n_train])
    if len(train) < n_train:
        raise ValueError(f"only {len(train)} training pairs available after holding out words")
    if noise_rate:
        train = synth.add_noise(train, noise_rate, seed=spec.seed)

    save_corpus(train, d / "data" / "train.src", d / "data" / "train.tgt")
    save_corpus(dev, d / "data" / "dev.src", d / "data" / "dev.tgt")
    save_corpus(test, d / "data" / "test.src", d / "data" / "test.tgt")
    lexicon.save_lexicon(gen.entries(Category.FUNCTION_WORD), d / "data" / "function_words.tsv")
    lexicon.save_lexicon(gen.entries(Category.VERB_PHRASE), d / "data" / "verb_phrases.tsv")
    with open(d / "data" / "synsets.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for rec in synth.synset_records(gen.entries(Category.SYNSET)):
            fh.write(" ".join(rec.headword) + "\t" + ",".join(" ".join(s) for s in rec.synonyms) + "\n")
    with open(d / "data" / "suffixes.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(gen.suffixes.suffixes) + "\n")

    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["paths"] = {
        "train_source": "data/train.src", "train_target": "data/train.tgt",
        "dev_source": "data/dev.src", "dev_target": "data/dev.tgt",
        "test_source": "data/test.src", "test_target": "data/test.tgt",
        "synset": "data/synsets.tsv", "function_word": "data/function_words.tsv",
        "verb_phrase": "data/verb_phrases.tsv", "suffixes": "data/suffixes.txt",
        "output_dir": "runs",
    }
    base_settings = {
        "clean": {"source_script": "latin", "target_script": "devanagari"},
        "lm": {"unk_threshold": "1"},
    }
    for section, values in (settings or {}).items():
        base_settings.setdefault(section, {}).update(values)
    for section, values in base_settings.items():
        cp[section] = values
    for name, values in ladder:
        cp[f"experiment {name}"] = dict(values)
    path = d / "experiment.ini"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        cp.write(fh)
    return path
