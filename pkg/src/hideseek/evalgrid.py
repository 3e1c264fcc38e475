"""Protection-vs-budget evaluation grid.

For each hiding strategy the grid reports three things side by side:

* protection: mean privacy score against an identity baseline, a trained
  black-box inversion attacker, and an informed attacker that also holds the
  hider's surrogate gazetteers;
* translation utility: BLEU-2/ROUGE-1 of the de-anonymized output against a
  dictionary reference translation of the original corpus, next to the same
  scores for the raw (still obscured) output;
* classification budget: micro/macro F1 of the keyword classifier on hidden
  versus unhidden inputs, with the deltas.

The pairing list at the end lines up each strategy's protection with the
utility it costs, one row per strategy per task.
"""

from __future__ import annotations

from dataclasses import dataclass

from .adversary import (
    IdentityAttacker,
    InformedAttacker,
    InversionAttacker,
    evaluate_pairs,
    record_queries,
    train_inversion,
)
from .backends import LlmRequest, MockClassify, MockDictTranslate, builtin_lexicon_path
from .corpus import SynthDoc, default_keyword_table
from .metrics import prf, translation_report
from .pipeline import HideEngine, run_pipeline
from .seek import SeekConfig
from .textutil import tokenize
from .types import TaskType

STRATEGIES = ("label_based/bare", "generative")
ATTACKER_COLUMNS = ("Identity", "Black", "White (hider)")


@dataclass(frozen=True)
class EvalGrid:
    """All numbers behind the eval table, JSON-ready via to_dict."""

    n_docs: int
    seed: int
    has_labels: bool
    protection: dict[str, dict[str, float]]
    translate: dict[str, dict[str, float]]
    classify: dict[str, dict[str, float]]
    pairing: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "n_docs": self.n_docs,
            "seed": self.seed,
            "has_labels": self.has_labels,
            "protection": {k: dict(v) for k, v in self.protection.items()},
            "translate": {k: dict(v) for k, v in self.translate.items()},
            "classify": {k: dict(v) for k, v in self.classify.items()},
            "pairing": [dict(p) for p in self.pairing],
        }


def _predict(classifier: MockClassify, text: str) -> str:
    return classifier.complete(LlmRequest.user(text))


def _build_engine(name: str, seed: int) -> HideEngine:
    if name == "generative":
        return HideEngine.build("generative", seed=seed)
    mode = name.split("/", 1)[1]
    return HideEngine.build("label", label_mode=mode, seed=seed)


def run_eval_grid(
    corpus: list[SynthDoc],
    *,
    seed: int = 0,
    seek_cfg: SeekConfig = SeekConfig(),
    strategies: tuple[str, ...] = STRATEGIES,
) -> EvalGrid:
    """Score every strategy on protection, translation utility and
    classification budget over one corpus."""
    if not corpus:
        raise ValueError("cannot evaluate an empty corpus")
    texts = [doc.text for doc in corpus]
    labels = [doc.label for doc in corpus]
    has_labels = any(labels)

    translator = MockDictTranslate.from_file(builtin_lexicon_path())
    references = [tokenize(translator.translate_text(text)) for text in texts]
    classifier = MockClassify(default_keyword_table())
    unhidden_pred = [_predict(classifier, text) for text in texts]

    protection: dict[str, dict[str, float]] = {}
    translate: dict[str, dict[str, float]] = {}
    classify: dict[str, dict[str, float]] = {}
    pairing: list[dict] = []

    for name in strategies:
        engine = _build_engine(name, seed)

        pairs, failures = record_queries(texts, engine)
        table = train_inversion(pairs)
        attackers = {
            "Identity": IdentityAttacker(),
            "Black": InversionAttacker(table=table),
            "White (hider)": InformedAttacker(
                table=table,
                gazetteers=tuple(gaz for _, gaz in engine.policy.surrogate_gazetteers),
            ),
        }
        protection[name] = {
            column: evaluate_pairs(
                pairs, attacker, name, skipped=tuple(failures), keep_per_doc=False
            ).mean_privacy_score
            for column, attacker in attackers.items()
        }

        restored: list[list[str]] = []
        unrestored: list[list[str]] = []
        hidden_pred: list[str] = []
        for text in texts:
            run = run_pipeline(text, engine, translator, TaskType.TRANSLATE, seek_cfg=seek_cfg)
            restored.append(tokenize(run.record.d))
            unrestored.append(tokenize(run.record.l))
            hidden_pred.append(_predict(classifier, run.record.e))

        restored_report = translation_report(restored, references)
        unrestored_report = translation_report(unrestored, references)
        translate[name] = {
            "restored_bleu2": restored_report.bleu2,
            "unrestored_bleu2": unrestored_report.bleu2,
            "restored_rouge1": restored_report.rouge1,
            "unrestored_rouge1": unrestored_report.rouge1,
            "restored_meteor": restored_report.meteor_exact,
            "unrestored_meteor": unrestored_report.meteor_exact,
        }

        if has_labels:
            hidden = prf(labels, hidden_pred)
            unhidden = prf(labels, unhidden_pred)
            classify[name] = {
                "hidden_micro_f1": hidden.micro.f1,
                "unhidden_micro_f1": unhidden.micro.f1,
                "delta_micro_f1": unhidden.micro.f1 - hidden.micro.f1,
                "hidden_macro_f1": hidden.macro.f1,
                "unhidden_macro_f1": unhidden.macro.f1,
                "delta_macro_f1": unhidden.macro.f1 - hidden.macro.f1,
            }

        row = {
            "strategy": name,
            "privacy_score": protection[name]["Black"],
            "budget_translate_bleu2": 1.0 - translate[name]["restored_bleu2"],
        }
        if has_labels:
            row["budget_classify_micro_f1"] = classify[name]["delta_micro_f1"]
        pairing.append(row)

    return EvalGrid(
        n_docs=len(corpus),
        seed=seed,
        has_labels=has_labels,
        protection=protection,
        translate=translate,
        classify=classify,
        pairing=tuple(pairing),
    )


def _fmt(value: float) -> str:
    return f"{value:.4f}"


def format_eval_table(grid: EvalGrid) -> str:
    """Render the grid as the aligned text table the eval command prints."""
    width = max(len(s) for s in grid.protection) + 2
    lines: list[str] = []
    lines.append(f"Evaluation grid: {grid.n_docs} documents, seed {grid.seed}")
    lines.append("")

    lines.append("Protection (mean privacy score; higher = harder to invert)")
    header = f"{'strategy':<{width}}" + "".join(f"{c:>16}" for c in ATTACKER_COLUMNS)
    lines.append(header)
    for name, row in grid.protection.items():
        lines.append(
            f"{name:<{width}}" + "".join(f"{_fmt(row[c]):>16}" for c in ATTACKER_COLUMNS)
        )
    if "label_based/bare" in grid.protection and "generative" in grid.protection:
        lab = grid.protection["label_based/bare"]["Black"]
        gen = grid.protection["generative"]["Black"]
        verdict = "holds" if lab > gen else "does NOT hold"
        lines.append(
            f"direction label_based > generative under the black-box attacker: {verdict} "
            f"({_fmt(lab)} vs {_fmt(gen)})"
        )
    lines.append("")

    lines.append("Translation utility (dictionary reference; restored vs unrestored)")
    cols = ("BLEU-2 rest", "BLEU-2 unrest", "ROUGE-1 rest", "ROUGE-1 unrest")
    lines.append(f"{'strategy':<{width}}" + "".join(f"{c:>16}" for c in cols))
    for name, row in grid.translate.items():
        values = (
            row["restored_bleu2"],
            row["unrestored_bleu2"],
            row["restored_rouge1"],
            row["unrestored_rouge1"],
        )
        lines.append(f"{name:<{width}}" + "".join(f"{_fmt(v):>16}" for v in values))
    lines.append("")

    lines.append("Classification budget (micro F1 on hidden vs unhidden inputs)")
    if grid.classify:
        cols = ("hidden", "unhidden", "delta")
        lines.append(f"{'strategy':<{width}}" + "".join(f"{c:>16}" for c in cols))
        for name, row in grid.classify.items():
            values = (row["hidden_micro_f1"], row["unhidden_micro_f1"], row["delta_micro_f1"])
            lines.append(f"{name:<{width}}" + "".join(f"{_fmt(v):>16}" for v in values))
    else:
        lines.append("corpus has no labels; section skipped")
    lines.append("")

    lines.append("Protection vs budget")
    cols = ("privacy", "budget(BLEU-2)", "budget(micro-F1)")
    lines.append(f"{'strategy':<{width}}" + "".join(f"{c:>18}" for c in cols))
    for row in grid.pairing:
        budget_cls = row.get("budget_classify_micro_f1")
        rendered = (
            _fmt(row["privacy_score"]),
            _fmt(row["budget_translate_bleu2"]),
            _fmt(budget_cls) if budget_cls is not None else "n/a",
        )
        lines.append(f"{row['strategy']:<{width}}" + "".join(f"{v:>18}" for v in rendered))
    return "\n".join(lines)
