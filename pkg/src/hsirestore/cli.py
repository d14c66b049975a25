"""Command line entry point: ``hsirestore {synth,simulate,denoise,metrics,bands}``.

Band numbers on the command line start at 1. Every command computes all of
its results before touching the filesystem, then writes each output through a
temporary file, so a failure leaves no partial outputs behind.
"""
import argparse
import io as _io
import logging
import os
import sys
import tempfile

import numpy as np

from . import io, metrics, noise, plotting, solver, synthetic
from .errors import HSIRestoreError

log = logging.getLogger("hsirestore")


def _fmt(x):
    return repr(float(x))


def _commit(outputs):
    """Write ``{path: bytes | callable(tmp_path)}`` all-or-nothing."""
    staged = []
    try:
        for path, content in outputs.items():
            directory = os.path.dirname(os.path.abspath(path))
            fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
            os.close(fd)
            staged.append((tmp, path))
            if callable(content):
                content(tmp)
            else:
                with open(tmp, "wb") as fh:
                    fh.write(content)
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _figure_path(csv_path):
    return os.path.splitext(csv_path)[0] + ".png"


def _figure_writer(fn, *args):
    def write(tmp):
        # savefig picks the format from the extension, the temp name has none
        buf = _io.BytesIO()
        fn(*args, buf)
        with open(tmp, "wb") as fh:
            fh.write(buf.getvalue())
    return write


def trace_csv(trace):
    cols = ["iter", "error1", "error2", "error3"]
    with_quality = len(trace.mpsnr) == len(trace) and len(trace) > 0
    if with_quality:
        cols += ["mpsnr", "mssim"]
    lines = [",".join(cols)]
    for i in range(len(trace)):
        row = [str(i + 1), _fmt(trace.error1[i]), _fmt(trace.error2[i]), _fmt(trace.error3[i])]
        if with_quality:
            row += [_fmt(trace.mpsnr[i]), _fmt(trace.mssim[i])]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def report_csv(report):
    lines = ["band,psnr,ssim"]
    for b, (p, s) in enumerate(zip(report.psnr, report.ssim), 1):
        lines.append(f"{b},{_fmt(p)},{_fmt(s)}")
    lines.append("mpsnr,mssim,ergas,msad")
    lines.append(",".join(_fmt(v) for v in (report.mpsnr, report.mssim, report.ergas, report.msad)))
    return "\n".join(lines) + "\n"


def cmd_synth(args):
    shape = tuple(int(v) for v in args.shape.split(","))
    if len(shape) != 3:
        raise ValueError("--shape takes m,n,p")
    cube = synthetic.make_cube(shape, seed=args.seed)
    _commit({args.out: io.encode_ht3(cube)})


def cmd_simulate(args):
    clean = io.load_ht3(args.input)
    spec = noise.default_spec(args.case, clean.shape[2], seed=args.seed)
    if args.spec:
        _, overrides = io.load_config(args.spec)
        overrides.setdefault("seed", args.seed)
        spec = io.noise_spec(overrides, base=spec)
    noisy, _ = noise.apply_noise(clean, spec)
    echo = io.format_noise_spec(spec)
    _commit({args.out: io.encode_ht3(noisy), args.out + ".spec": echo.encode()})
    sys.stdout.write(echo)


def cmd_denoise(args):
    observed = io.load_ht3(args.input)
    cfg = solver.SolverConfig()
    if args.config:
        solver_kwargs, _ = io.load_config(args.config)
        cfg = io.solver_config(solver_kwargs)
    reference = io.load_ht3(args.ref) if args.ref else None
    if reference is not None and reference.shape != observed.shape:
        raise ValueError(f"--ref shape {reference.shape} differs from input {observed.shape}")

    ranges = None
    if args.normalize:
        observed, ranges = io.normalize_bands(observed)
        if reference is not None:
            lo, hi = ranges[:, 0], ranges[:, 1]
            reference = (reference - lo) / np.where(hi > lo, hi - lo, 1.0)

    L, S, N, trace = solver.denoise(observed, cfg, reference=reference)
    log.info("finished after %d iterations (converged: %s)", len(trace), trace.converged)

    def restore(t, offset):
        if ranges is None:
            return t
        span = ranges[:, 1] - ranges[:, 0]
        return t * span + (ranges[:, 0] if offset else 0.0)

    outputs = {args.out: io.encode_ht3(restore(L, True))}
    if args.out_sparse:
        outputs[args.out_sparse] = io.encode_ht3(restore(S, False))
    if args.out_gauss:
        outputs[args.out_gauss] = io.encode_ht3(restore(N, False))
    if args.trace:
        outputs[args.trace] = trace_csv(trace).encode()
        if args.plot:
            outputs[_figure_path(args.trace)] = _figure_writer(plotting.plot_trace, trace)
    _commit(outputs)


def cmd_metrics(args):
    x = io.load_ht3(args.x)
    ref = io.load_ht3(args.ref)
    report = metrics.evaluate(x, ref)
    outputs = {args.out: report_csv(report).encode()}
    if args.plot:
        outputs[_figure_path(args.out)] = _figure_writer(plotting.plot_band_metrics, report)
    _commit(outputs)
    print(f"mpsnr={report.mpsnr:.4f} mssim={report.mssim:.4f} "
          f"ergas={report.ergas:.4f} msad={report.msad:.4f}")


def cmd_bands(args):
    cube = io.load_ht3(args.input)
    p = cube.shape[2]
    if not 1 <= args.band <= p:
        raise ValueError(f"--band must be in [1, {p}], got {args.band}")
    _commit({args.out: io.encode_pgm(cube[..., args.band - 1])})


def build_parser():
    parser = argparse.ArgumentParser(prog="hsirestore", description="Mixed-noise removal for hyperspectral cubes.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a seeded synthetic clean cube")
    p.add_argument("--out", required=True)
    p.add_argument("--shape", default="64,64,20")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="add one of the six mixed-noise cases")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--case", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--spec", help="key=value file overriding the case defaults")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("denoise", help="restore a noisy cube")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--ref", help="clean cube; adds mpsnr/mssim to the trace")
    p.add_argument("--trace")
    p.add_argument("--out-sparse")
    p.add_argument("--out-gauss")
    p.add_argument("--normalize", action="store_true",
                   help="min-max scale each band to [0, 1] first and undo it on output")
    p.add_argument("--plot", action="store_true", help="also render the trace as PNG")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("metrics", help="quality indices against a reference")
    p.add_argument("--x", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true", help="also render per-band PNG")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bands", help="export one band as 8-bit PGM")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--band", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bands)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (HSIRestoreError, OSError, ValueError) as exc:
        print(f"hsirestore {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
