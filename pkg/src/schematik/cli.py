"""Command-line pipeline: dataset generation, detection, the full
detect->postprocess->order->snip->OCR->evaluate run, padding/scale sweeps,
and scenario comparison reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from schematik import __version__
from schematik.augment import AugmentParams, augment
from schematik.corpus import (
    DatasetManifest,
    Detection,
    PageAnnotation,
    load_annotations,
    read_detections_json,
    read_manifest,
    write_detections_json,
    write_manifest,
    write_voc,
)
from schematik.detectors import OracleDetector, OraclePerturbation, RlsaDetector
from schematik.metrics import (
    EvalReport,
    evaluate_detections,
    improvement,
    mean_reports,
    cer as cer_metric,
    wer as wer_metric,
    write_reports_csv,
    write_reports_json,
)
from schematik.ocr_bridge import (
    CorruptionModel,
    ExternalOcrEngine,
    MockOcrEngine,
    ocr,
    write_results_jsonl,
)
from schematik.postprocess import filter_confidence, merge_overlapping
from schematik.raster import read_png, write_heatmap_png, write_png
from schematik.seeding import stable_seed
from schematik.snippets import export_snippets, extract_page_snippets
from schematik.synthgen.pagegen import (
    SynthConfig,
    generate_dataset,
    load_config,
    load_transcripts,
)


class CliError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Dataset access


class Dataset:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / "manifest.jsonl"
        if not manifest_path.exists():
            raise CliError(f"no manifest.jsonl under {self.root}")
        self.manifest: DatasetManifest = read_manifest(manifest_path)
        self.annotations: dict[str, PageAnnotation] = {
            a.page_id: a for a in load_annotations(self.manifest, self.root)
        }
        transcripts_path = self.root / "transcripts.jsonl"
        self.transcripts = load_transcripts(transcripts_path) if transcripts_path.exists() else {}

    def page_ids(self) -> list[str]:
        return sorted(e.page_id for e in self.manifest.entries)

    def image(self, page_id: str):
        entry = next(e for e in self.manifest.entries if e.page_id == page_id)
        return read_png(self.root / entry.image_path)


def _detect_all(dataset: Dataset, detector_spec: str, seed: int, jitter: float, flip: float):
    """Run the named detector over every page; external:FILE passes a
    validated interchange file through."""
    if detector_spec.startswith("external:"):
        path = detector_spec.split(":", 1)[1]
        per_page = read_detections_json(path)
        unknown = set(per_page) - set(dataset.page_ids())
        if unknown:
            raise CliError(f"external detections reference unknown pages: {sorted(unknown)}")
        return {pid: per_page.get(pid, []) for pid in dataset.page_ids()}
    if detector_spec == "oracle":
        det = OracleDetector(
            dataset.annotations,
            OraclePerturbation(jitter_sigma=jitter, label_flip_prob=flip),
            seed=stable_seed(seed, "detect"),
        )
    elif detector_spec == "rlsa":
        det = RlsaDetector()
    else:
        raise CliError(f"unknown detector {detector_spec!r} (oracle | rlsa | external:FILE)")
    return {pid: det.detect(dataset.image(pid), pid).detections for pid in dataset.page_ids()}


def _make_engine(engine_spec: str, dataset: Dataset, model: CorruptionModel):
    if engine_spec == "mock":
        if not dataset.transcripts:
            raise CliError("mock engine needs transcripts.jsonl in the dataset")
        return MockOcrEngine(dataset.transcripts, model)
    if engine_spec == "external":
        return ExternalOcrEngine()
    if engine_spec.startswith("external:"):
        return ExternalOcrEngine(engine_spec.split(":", 1)[1])
    raise CliError(f"unknown engine {engine_spec!r} (mock | external[:CMD])")


def _reference_text(dataset: Dataset, page_id: str) -> str:
    entries = dataset.transcripts.get(page_id, [])
    return "\n".join(t.text for t in entries)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_generate(args) -> int:
    cfg = load_config(args.config) if args.config else SynthConfig()
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    generate_dataset(cfg, args.pages, args.out, emit_pgm=args.pgm)
    print(f"generated {args.pages} pages under {args.out}")
    return 0


def cmd_augment(args) -> int:
    params = (
        AugmentParams.from_dict(json.loads(Path(args.params).read_text(encoding="utf-8")))
        if args.params
        else AugmentParams()
    )
    if args.seed is not None:
        params = replace(params, seed=args.seed)
    dataset = Dataset(args.dataset)
    out = Path(args.out)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "annotations").mkdir(parents=True, exist_ok=True)
    entries = []
    for entry in dataset.manifest.entries:
        image = dataset.image(entry.page_id)
        ann = dataset.annotations[entry.page_id]
        aug_image, aug_ann = augment(image, ann, params)
        write_png(aug_image, out / entry.image_path)
        (out / entry.annotation_path).write_bytes(write_voc(aug_ann))
        entries.append(replace(entry, class_histogram=aug_ann.class_histogram()))
    write_manifest(DatasetManifest(entries), out / "manifest.jsonl")
    (out / "augment.json").write_text(json.dumps(params.to_dict(), indent=1), encoding="utf-8")
    print(f"augmented {len(entries)} pages under {out}")
    return 0


def cmd_detect(args) -> int:
    dataset = Dataset(args.dataset)
    per_page = _detect_all(dataset, args.detector, args.seed, args.jitter_sigma, args.label_flip_prob)
    write_detections_json(per_page, args.out)
    n = sum(len(v) for v in per_page.values())
    print(f"wrote {n} detections for {len(per_page)} pages to {args.out}")
    return 0


def _pipeline_parameters(args) -> dict:
    return {
        "detector": args.detector,
        "engine": args.engine,
        "padding": args.padding,
        "scale": args.scale,
        "confidence_threshold": args.confidence_threshold,
        "merge_iou_threshold": args.merge_iou_threshold,
        "substitution_rate": args.substitution_rate,
        "insertion_rate": args.insertion_rate,
        "deletion_rate": args.deletion_rate,
        "seed": args.seed,
        "workers": args.workers,
        "version": __version__,
    }


def _run_page(
    dataset: Dataset,
    page_id: str,
    detections: list[Detection],
    engine,
    padding: float,
    scale: float,
    conf_threshold: float,
    merge_threshold: float,
    workers: int,
):
    filtered = filter_confidence(detections, conf_threshold)
    merged = merge_overlapping(filtered, merge_threshold)
    image = dataset.image(page_id)
    snips = extract_page_snippets(image, merged, page_id, padding, scale)
    results = ocr(snips, engine, workers)
    hyp = "\n".join(r.text for r in results)
    ref = _reference_text(dataset, page_id)

    report = evaluate_detections(dataset.annotations[page_id], merged)
    if ref.strip():
        report.cer = cer_metric(ref, hyp)
        report.wer = wer_metric(ref, hyp)
    return filtered, merged, snips, results, report


def cmd_pipeline(args) -> int:
    dataset = Dataset(args.dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model = CorruptionModel(
        substitution_rate=args.substitution_rate,
        insertion_rate=args.insertion_rate,
        deletion_rate=args.deletion_rate,
        seed=stable_seed(args.seed, "ocr"),
    )
    engine = _make_engine(args.engine, dataset, model)
    raw = _detect_all(dataset, args.detector, args.seed, args.jitter_sigma, args.label_flip_prob)

    filtered_all: dict[str, list[Detection]] = {}
    merged_all: dict[str, list[Detection]] = {}
    all_results = []
    reports: dict[str, EvalReport] = {}
    for pid in dataset.page_ids():
        filtered, merged, snips, results, report = _run_page(
            dataset, pid, raw[pid], engine, args.padding, args.scale,
            args.confidence_threshold, args.merge_iou_threshold, args.workers,
        )
        filtered_all[pid] = filtered
        merged_all[pid] = merged
        all_results.extend(results)
        reports[pid] = report
        if args.export_snippets:
            export_snippets(snips, out / "snippets")

    write_detections_json(raw, out / "detections_raw.json")
    write_detections_json(filtered_all, out / "detections_filtered.json")
    write_detections_json(merged_all, out / "detections_merged.json")
    write_results_jsonl(all_results, out / "ocr_results.jsonl")
    write_reports_json(reports, out / "pages.json")
    write_reports_csv(reports, out / "pages.csv")

    aggregate = mean_reports(list(reports.values()))
    payload = {
        "parameters": _pipeline_parameters(args),
        "pages": {pid: reports[pid].to_dict() for pid in sorted(reports)},
        "aggregate": aggregate.to_dict(),
    }
    (out / "report.json").write_text(json.dumps(payload, indent=1), encoding="utf-8")

    cer_txt = "n/a" if aggregate.cer is None else f"{aggregate.cer:.4f}"
    wer_txt = "n/a" if aggregate.wer is None else f"{aggregate.wer:.4f}"
    print(
        f"pipeline over {len(reports)} pages: CER {cer_txt}, WER {wer_txt}, "
        f"bbox accuracy {aggregate.bbox_accuracy:.4f}, accuracy {aggregate.accuracy:.4f}"
    )
    return 0


def cmd_sweep(args) -> int:
    dataset = Dataset(args.dataset)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paddings = [float(v) for v in args.paddings.split(",") if v != ""]
    scales = [float(v) for v in args.scales.split(",") if v != ""]
    if not paddings or not scales:
        raise CliError("sweep needs at least one padding and one scale")
    model = CorruptionModel(
        substitution_rate=args.substitution_rate,
        insertion_rate=args.insertion_rate,
        deletion_rate=args.deletion_rate,
        seed=stable_seed(args.seed, "ocr"),
    )
    engine = _make_engine(args.engine, dataset, model)
    raw = _detect_all(dataset, args.detector, args.seed, args.jitter_sigma, args.label_flip_prob)

    cer_matrix = [[0.0] * len(scales) for _ in paddings]
    wer_matrix = [[0.0] * len(scales) for _ in paddings]
    for i, padding in enumerate(paddings):
        for j, scale in enumerate(scales):
            cers, wers = [], []
            for pid in dataset.page_ids():
                _, _, _, results, report = _run_page(
                    dataset, pid, raw[pid], engine, padding, scale,
                    args.confidence_threshold, args.merge_iou_threshold, args.workers,
                )
                if report.cer is not None:
                    cers.append(report.cer)
                    wers.append(report.wer)
            if not cers:
                raise CliError("sweep pages have no reference transcripts")
            cer_matrix[i][j] = sum(cers) / len(cers)
            wer_matrix[i][j] = sum(wers) / len(wers)

    for name, matrix in (("cer", cer_matrix), ("wer", wer_matrix)):
        with open(out / f"{name}_matrix.csv", "w", encoding="utf-8") as fh:
            fh.write("padding\\scale," + ",".join(f"{s:g}" for s in scales) + "\n")
            for padding, row in zip(paddings, matrix):
                fh.write(f"{padding:g}," + ",".join(f"{v:.6f}" for v in row) + "\n")
        write_heatmap_png(matrix, out / f"{name}_matrix.png")
    (out / "sweep.json").write_text(
        json.dumps(
            {
                "paddings": paddings,
                "scales": scales,
                "cer": cer_matrix,
                "wer": wer_matrix,
                "parameters": _pipeline_parameters(args),
            },
            indent=1,
        ),
        encoding="utf-8",
    )
    print(f"swept {len(paddings)}x{len(scales)} cells over {len(dataset.page_ids())} pages")
    return 0


def _load_scenarios(args) -> list[dict]:
    scenarios = []
    for path in args.results or []:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        agg = payload.get("aggregate", {})
        if agg.get("cer") is None or agg.get("wer") is None:
            raise CliError(f"{path} has no aggregate CER/WER")
        scenarios.append(
            {
                "name": Path(path).parent.name or Path(path).stem,
                "cer": float(agg["cer"]),
                "wer": float(agg["wer"]),
                "pages": sorted(payload.get("pages", {})),
            }
        )
    for row in args.row or []:
        try:
            name, rates = row.split("=", 1)
            cer_v, wer_v = (float(v) for v in rates.split(","))
        except ValueError as exc:
            raise CliError(f"bad --row {row!r}, expected NAME=CER,WER") from exc
        scenarios.append({"name": name, "cer": cer_v, "wer": wer_v, "pages": None})
    return scenarios


def cmd_report(args) -> int:
    scenarios = _load_scenarios(args)
    if len(scenarios) < 1:
        raise CliError("report needs at least one scenario (--results or --row)")
    page_sets = [s["pages"] for s in scenarios if s["pages"] is not None]
    if page_sets and any(ps != page_sets[0] for ps in page_sets[1:]):
        raise CliError("scenarios cover different page sets; comparison is invalid")

    improvements = []
    for i in range(len(scenarios)):
        for j in range(i + 1, len(scenarios)):
            a, b = scenarios[i], scenarios[j]
            improvements.append(
                {
                    "baseline": a["name"],
                    "comparison": b["name"],
                    "cer_improvement_pct": improvement(a["cer"], b["cer"]),
                    "wer_improvement_pct": improvement(a["wer"], b["wer"]),
                }
            )

    payload = {
        "scenarios": [{k: s[k] for k in ("name", "cer", "wer")} for s in scenarios],
        "improvements": improvements,
    }
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=1), encoding="utf-8")
        csv_path = Path(args.out).with_suffix(".csv")
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write("scenario,cer,wer\n")
            for s in scenarios:
                fh.write(f"{s['name']},{s['cer']:.6f},{s['wer']:.6f}\n")
            fh.write("baseline,comparison,cer_improvement_pct,wer_improvement_pct\n")
            for imp in improvements:
                fh.write(
                    f"{imp['baseline']},{imp['comparison']},"
                    f"{imp['cer_improvement_pct']:.2f},{imp['wer_improvement_pct']:.2f}\n"
                )

    for s in scenarios:
        print(f"{s['name']}: CER {s['cer']:.4f}  WER {s['wer']:.4f}")
    for imp in improvements:
        print(
            f"{imp['baseline']} -> {imp['comparison']}: "
            f"CER improved {imp['cer_improvement_pct']:.2f}%, "
            f"WER improved {imp['wer_improvement_pct']:.2f}%"
        )
    return 0


# ---------------------------------------------------------------------------
# Parser


def _add_pipeline_args(p: argparse.ArgumentParser):
    p.add_argument("--dataset", required=True, help="dataset directory (from `generate`)")
    p.add_argument("--detector", default="oracle", help="oracle | rlsa | external:FILE")
    p.add_argument("--engine", default="mock", help="mock | external[:CMD]")
    p.add_argument("--confidence-threshold", type=float, default=0.1)
    p.add_argument("--merge-iou-threshold", type=float, default=0.3)
    p.add_argument("--substitution-rate", type=float, default=0.0)
    p.add_argument("--insertion-rate", type=float, default=0.0)
    p.add_argument("--deletion-rate", type=float, default=0.0)
    p.add_argument("--jitter-sigma", type=float, default=0.0)
    p.add_argument("--label-flip-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schematik",
        description="Synthetic Schematismus-style pages, layout detection, OCR snippets, evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"schematik {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic annotated dataset")
    p.add_argument("-n", "--pages", type=int, required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--config", help="JSON file of generator settings")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--pgm", action="store_true", help="also write P5 PGM rasters")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("augment", help="augment a generated dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--params", help="JSON file of augmentation settings")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("detect", help="run a detector, write interchange JSON")
    p.add_argument("--dataset", required=True)
    p.add_argument("--detector", default="oracle")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jitter-sigma", type=float, default=0.0)
    p.add_argument("--label-flip-prob", type=float, default=0.0)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("pipeline", help="detect, postprocess, order, snip, OCR, evaluate")
    _add_pipeline_args(p)
    p.add_argument("--padding", type=float, default=4.0)
    p.add_argument("--scale", type=float, default=1.6)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--export-snippets", action="store_true")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("sweep", help="CER/WER matrices over padding x scale")
    _add_pipeline_args(p)
    p.add_argument("--paddings", default="0,2,4,6")
    p.add_argument("--scales", default="1.0,1.3,1.6,2.0")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="compare scenario CER/WER with improvements")
    p.add_argument("--results", nargs="*", help="pipeline report.json files")
    p.add_argument("--row", action="append", help="inline scenario NAME=CER,WER")
    p.add_argument("-o", "--out", help="write JSON (+ CSV twin) here")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "pages", None) is not None and args.command == "generate" and args.pages < 1:
        parser.error("--pages must be >= 1")
    try:
        return args.func(args)
    except (CliError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
