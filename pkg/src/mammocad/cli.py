"""Command-line interface.

Subcommands:
    enhance <in.pgm> <out.pgm> [--gain G] [--levels J]
    detect <in.pgm> [--report PATH] [--overlay PATH] [--config PATH]
    phantom --out DIR [--count N] [--seed S] [--nodules K] [--lines K]
            [--noise SIGMA] [--width W] [--height H]
    froc --reports DIR --truths DIR --out CSV

Exit codes: 0 success, 1 input error, 2 internal error.
"""

import argparse
import os
import sys

from . import evaluation, pipeline
from .errors import MammocadError
from .image_io import load_pgm, normalize, render_overlay, save_pgm
from .wavelet import DEFAULT_GAIN, enhance_image


def _cmd_enhance(args):
    image = load_pgm(args.input)
    out = enhance_image(image, args.levels, args.gain)
    # reconstruction of amplified details is signed; map back to the source
    # intensity range for storage
    out = normalize(out, 0, (1 << image.bit_depth) - 1)
    save_pgm(out, args.output)
    return 0


def _cmd_detect(args):
    image = load_pgm(args.input)
    config = pipeline.read_config(args.config) if args.config \
        else pipeline.PipelineConfig()
    report = pipeline.detect(image, config, source=str(args.input))
    accepted = report.accepted()
    if args.report:
        pipeline.write_report(report, args.report)
    if args.overlay:
        skipped = render_overlay(image, accepted, args.overlay)
        if skipped:
            print("warning: %d detection(s) outside bounds skipped"
                  % skipped, file=sys.stderr)
    print("%s: %d accepted / %d fits (%d failed), %d ROI windows"
          % (args.input, len(accepted), report.fits_attempted,
             report.fits_failed, report.roi_windows_fired))
    return 0


def _cmd_phantom(args):
    os.makedirs(args.out, exist_ok=True)
    for i in range(args.count):
        phantom = evaluation.generate_phantom(
            width=args.width, height=args.height, n_nodules=args.nodules,
            n_lines=args.lines, noise_sigma=args.noise, seed=args.seed + i)
        stem = os.path.join(args.out, "phantom_%03d" % i)
        save_pgm(phantom.image, stem + ".pgm")
        evaluation.write_truths(phantom, stem + ".truth.json")
    print("wrote %d phantom(s) to %s" % (args.count, args.out))
    return 0


def _cmd_froc(args):
    suffix = ".report.json"
    names = sorted(n for n in os.listdir(args.reports) if n.endswith(suffix))
    if not names:
        raise ValueError("no *%s files in %s" % (suffix, args.reports))
    batch = []
    for name in names:
        stem = name[:-len(suffix)]
        truth_path = os.path.join(args.truths, stem + ".truth.json")
        if not os.path.exists(truth_path):
            raise ValueError("missing truth file %s" % truth_path)
        report = pipeline.read_report(os.path.join(args.reports, name))
        truths, _ = evaluation.read_truths(truth_path)
        batch.append((report, truths))
    points = evaluation.froc_curve(batch)
    evaluation.write_froc_csv(points, args.out)
    print("wrote %d FROC points to %s" % (len(points), args.out))
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mammocad",
        description="Wavelet-enhanced nodular bright-spot detection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enhance", help="wavelet detail enhancement")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--gain", type=float, default=DEFAULT_GAIN)
    p.add_argument("--levels", type=int, default=None,
                   help="decomposition depth (default: full)")
    p.set_defaults(func=_cmd_enhance)

    p = sub.add_parser("detect", help="run the detection pipeline")
    p.add_argument("input")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--overlay", help="write a PPM overlay here")
    p.add_argument("--config", help="JSON pipeline config")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("phantom", help="generate seeded phantoms")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodules", type=int, default=8)
    p.add_argument("--lines", type=int, default=4)
    p.add_argument("--noise", type=float,
                   default=evaluation.DEFAULT_NOISE_SIGMA)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("froc", help="FROC curve from report/truth directories")
    p.add_argument("--reports", required=True)
    p.add_argument("--truths", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_froc)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MammocadError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print("internal error: %r" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
