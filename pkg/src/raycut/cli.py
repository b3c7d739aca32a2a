"""Command-line interface: segment, eval, phantom, serve.

Exit codes: 0 success, 1 usage/parameter errors, 2 I/O errors, 3 data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .errors import RaycutError
from .maxflow import warmup_solver
from .metrics import case_report, dice, format_case_table, report_json
from .phantom import PHANTOM_KINDS, make_phantom
from .pipeline import PHASES, SegParams, run_segmentation
from .surface import export_obj
from .volume import read_nrrd, volume_to_mask, write_nrrd, write_nrrd_mask


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _triple(text: str, cast=float):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(cast(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"could not parse {text!r}")


def _float_triple(text: str):
    return _triple(text, float)


def _int_triple(text: str):
    return _triple(text, int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="raycut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_seg = sub.add_parser("segment", help="segment a volume from a seed point")
    p_seg.add_argument("--input", required=True, help="input NRRD volume")
    p_seg.add_argument("--seed", required=True, type=_float_triple, metavar="x,y,z",
                       help="seed voxel index (or world mm with --seed-mm)")
    p_seg.add_argument("--seed-mm", action="store_true", help="seed is in world mm")
    p_seg.add_argument("--subdiv", type=int, default=3, help="icosphere subdivision level")
    p_seg.add_argument("--samples", type=int, default=60, help="radial samples per ray")
    p_seg.add_argument("--radius-mm", type=float, default=50.0, help="maximum ray radius")
    p_seg.add_argument("--delta-r", type=int, default=1, help="smoothness bound between neighbor rays")
    p_seg.add_argument("--mean-window", type=int, default=3, help="seed neighborhood size for the mean")
    p_seg.add_argument("--raw-costs", action="store_true",
                       help="skip cost conditioning; cut the raw |I - mu| costs")
    p_seg.add_argument("--out-mask", required=True, help="output mask NRRD path")
    p_seg.add_argument("--out-mesh", help="optional output OBJ path")
    p_seg.add_argument("--truth", help="optional truth mask NRRD for a DSC readout")
    p_seg.add_argument("--json", action="store_true", help="machine-readable report")
    p_seg.set_defaults(func=cmd_segment)

    p_eval = sub.add_parser("eval", help="compare predicted and truth masks")
    p_eval.add_argument("--pred", help="predicted mask NRRD")
    p_eval.add_argument("--truth", help="truth mask NRRD")
    p_eval.add_argument("--manifest", help="JSON list of {id, pred, truth} paths")
    p_eval.add_argument("--json", action="store_true", help="machine-readable report")
    p_eval.set_defaults(func=cmd_eval)

    p_ph = sub.add_parser("phantom", help="generate a synthetic volume with analytic truth")
    p_ph.add_argument("--kind", required=True, choices=PHANTOM_KINDS)
    p_ph.add_argument("--out", required=True, help="output NRRD volume path")
    p_ph.add_argument("--out-truth", help="optional analytic truth mask NRRD path")
    p_ph.add_argument("--rng-seed", type=int, default=0, help="noise RNG seed")
    p_ph.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise stddev")
    p_ph.add_argument("--inside", type=float, default=200.0, help="intensity inside the object")
    p_ph.add_argument("--outside", type=float, default=50.0, help="intensity outside the object")
    p_ph.add_argument("--radius-mm", type=float, default=20.0, help="sphere/shifted radius")
    p_ph.add_argument("--ellipsoid-axes", type=_float_triple, default=(25.0, 20.0, 15.0),
                      metavar="a,b,c", help="ellipsoid semi-axes in mm")
    p_ph.add_argument("--dims", type=_int_triple, default=(80, 80, 80), metavar="nx,ny,nz")
    p_ph.add_argument("--spacing", type=_float_triple, default=(1.0, 1.0, 1.0), metavar="sx,sy,sz")
    p_ph.set_defaults(func=cmd_phantom)

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--input", required=True, help="input NRRD volume")
    p_srv.add_argument("--truth", help="optional truth mask NRRD")
    p_srv.add_argument("--port", type=int, default=8080)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--ui", help="directory with the built web UI to serve at /")
    p_srv.set_defaults(func=cmd_serve)
    return parser


def cmd_segment(args) -> int:
    vol = read_nrrd(args.input)
    params = SegParams(
        seed=args.seed,
        seed_is_world=args.seed_mm,
        subdiv=args.subdiv,
        samples=args.samples,
        max_radius_mm=args.radius_mm,
        delta_r=args.delta_r,
        mean_window=args.mean_window,
        anchor=not args.raw_costs,
    )
    warmup_solver()
    res = run_segmentation(vol, params)
    write_nrrd_mask(res.mask, args.out_mask)
    if args.out_mesh:
        export_obj(res.mesh, args.out_mesh)

    dsc_pct = None
    if args.truth:
        truth = volume_to_mask(read_nrrd(args.truth))
        dsc_pct = 100.0 * dice(res.mask, truth)

    b_min = int(res.boundary.min())
    b_max = int(res.boundary.max())
    vol_mm3 = res.volume_mm3
    if args.json:
        payload = {
            "mu": res.mu,
            "phase_ms": {k: res.phase_ms[k] for k in PHASES},
            "total_ms": res.total_ms,
            "boundary_min": b_min,
            "boundary_max": b_max,
            "sphere": b_min == b_max,
            "volume_mm3": vol_mm3,
            "volume_cm3": vol_mm3 / 1000.0,
            "voxels": res.mask.voxel_count(),
            "mask": args.out_mask,
            "mesh": args.out_mesh,
            "dsc_pct": dsc_pct,
        }
        print(json.dumps(payload, indent=2))
        return 0
    print(f"mu         {res.mu:.3f}")
    for k in PHASES:
        print(f"{k:<10} {res.phase_ms[k]:>9.1f} ms")
    print(f"{'total':<10} {res.total_ms:>9.1f} ms")
    sphere_note = "  (sphere)" if b_min == b_max else ""
    print(f"boundary   min {b_min}  max {b_max}{sphere_note}")
    print(f"volume     {vol_mm3:.1f} mm3  ({vol_mm3 / 1000.0:.3f} cm3)")
    print(f"voxels     {res.mask.voxel_count()}")
    print(f"mask       written to {args.out_mask}")
    if args.out_mesh:
        print(f"mesh       written to {args.out_mesh}")
    if dsc_pct is not None:
        print(f"DSC        {dsc_pct:.2f} %")
    return 0


def cmd_eval(args) -> int:
    if args.manifest:
        with open(args.manifest, "r", encoding="utf-8") as fh:
            cases = json.load(fh)
        if not isinstance(cases, list):
            raise ValueError("manifest must be a JSON array of {id, pred, truth}")
        rows = []
        for entry in cases:
            pred = volume_to_mask(read_nrrd(entry["pred"]))
            truth = volume_to_mask(read_nrrd(entry["truth"]))
            rows.append(case_report(pred, truth, str(entry["id"])))
    elif args.pred and args.truth:
        pred = volume_to_mask(read_nrrd(args.pred))
        truth = volume_to_mask(read_nrrd(args.truth))
        rows = [case_report(pred, truth, args.pred)]
    else:
        raise ValueError("eval needs either --manifest or both --pred and --truth")
    if args.json:
        print(json.dumps(report_json(rows), indent=2))
    else:
        print(format_case_table(rows))
    return 0


def cmd_phantom(args) -> int:
    kwargs = dict(
        dims=args.dims,
        spacing=args.spacing,
        inside=args.inside,
        outside=args.outside,
        sigma=args.sigma,
        rng_seed=args.rng_seed,
    )
    if args.kind == "ellipsoid":
        kwargs["semi_axes_mm"] = args.ellipsoid_axes
    else:
        kwargs["radius_mm"] = args.radius_mm
    case = make_phantom(args.kind, **kwargs)
    write_nrrd(case.volume, args.out)
    print(f"phantom {args.kind} written to {args.out}  (seed voxel {','.join(map(str, case.seed_index))})")
    if args.out_truth:
        write_nrrd_mask(case.truth, args.out_truth)
        print(f"truth mask written to {args.out_truth}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(volume_path=args.input, truth_path=args.truth, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RaycutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
