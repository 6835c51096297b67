"""Command-line client.

Thin wrapper over the service handlers: flags are parsed into the same
request models the HTTP routes accept, and results are rendered as CSV or
JSON with shortest-round-trip float formatting.  Exit codes: 0 all passed,
1 numerical or resource failure, 2 usage/domain error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    DivergenceError,
    NumericalFailure,
    QuadratureUnderResolved,
    ResourceCapExceeded,
    TruncationViolation,
)
from .service import handlers
from .service import schemas as sc

CSV_SCHEMA_PREFIX = "primefock"


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex value {text!r}")


def _parse_z_assignment(text: str) -> tuple[int, complex]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(
            f"site weight must look like '2=0.5+0.5i', got {text!r}"
        )
    left, right = text.split("=", 1)
    return int(left), _parse_complex(right)


def _add_truncation_flags(p: argparse.ArgumentParser):
    p.add_argument("--p-max", type=int, default=None, help="largest site prime")
    p.add_argument("--a-max", type=int, default=None, help="per-site occupation cap")
    p.add_argument("--omega-max", type=int, default=None, help="total occupation cap")
    p.add_argument("--k-max", type=int, default=None, help="optional label cap")
    p.add_argument("--guard", type=int, default=None, help="interior guard width")


def _add_state_flags(p: argparse.ArgumentParser):
    p.add_argument("--sigma", type=float, default=None, help="Re s")
    p.add_argument("--t", type=float, default=0.0, help="Im s")
    p.add_argument(
        "--z",
        action="append",
        type=_parse_z_assignment,
        default=[],
        metavar="P=RE[+IMi]",
        help="site weight assignment, repeatable",
    )


def _add_output_flags(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", type=Path, default=None, help="write here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primefock",
        description="Coherent states on prime-labeled boson sites: "
        "verification suites, state tables, and finite-array spectra.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run a named verification suite")
    pv.add_argument("suite", help="suite name (e.g. ccr, mass, eigen, displacement)")
    _add_truncation_flags(pv)
    _add_state_flags(pv)
    pv.add_argument("--tol", type=float, default=None, help="tolerance override")
    pv.add_argument(
        "--occupation-cap", type=int, default=None,
        help="per-site occupation reach of the identity-resolution quadrature",
    )
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--output", type=Path, default=None)

    pn = sub.add_parser("ncs", help="coherent-state tables and expectations")
    pn.add_argument("action", choices=("amplitudes", "expect", "pmf"))
    _add_truncation_flags(pn)
    _add_state_flags(pn)
    _add_output_flags(pn)
    pn.add_argument("--limit", type=int, default=None, help="cap amplitude rows")
    pn.add_argument("--n-max", type=int, default=10, help="pmf rows 0..n_max")
    pn.add_argument(
        "--observable", choices=("N", "N2", "BH", "tower"), default="N"
    )
    pn.add_argument("--U", type=float, default=0.0)
    pn.add_argument("--mu-chem", type=float, default=0.0)
    pn.add_argument("--tau", type=float, default=0.0, help="hopping rate (BH observable)")
    pn.add_argument("--order", type=int, default=1, help="tower rank (tower observable)")

    ps = sub.add_parser("spectrum", help="finite-array spectra and sweeps")
    ps.add_argument("-N", "--sites", type=int, default=5)
    ps.add_argument("-n", "--particles", type=int, default=3)
    ps.add_argument("--gamma", type=float, default=1.0)
    ps.add_argument("--delta", type=float, default=0.0)
    ps.add_argument("--tau", type=float, default=None, help="single hopping rate")
    ps.add_argument("--tau-min", type=float, default=0.0)
    ps.add_argument("--tau-max", type=float, default=1.2)
    ps.add_argument("--tau-step", type=float, default=0.01)
    ps.add_argument("--m-lowest", type=int, default=None)
    ps.add_argument("--sigma", type=float, default=1.5)
    ps.add_argument("--t", type=float, default=0.0)
    ps.add_argument("--figure1", action="store_true", help="emit the two preset sweeps")
    ps.add_argument("--outdir", type=Path, default=Path("."))
    ps.add_argument("--transitions", action="store_true", help="report ground-state changes")
    _add_output_flags(ps)

    pserve = sub.add_parser("serve", help="run the HTTP service")
    pserve.add_argument("--host", default="127.0.0.1")
    pserve.add_argument("--port", type=int, default=8000)

    return parser


def _truncation_fields(args) -> dict:
    fields = {}
    for name in ("p_max", "a_max", "omega_max", "k_max", "guard"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    return fields


def _truncation_model(args) -> sc.TruncationModel | None:
    fields = _truncation_fields(args)
    return sc.TruncationModel(**fields) if fields else None


def _truncation_overrides(args) -> sc.TruncationOverrides | None:
    fields = _truncation_fields(args)
    return sc.TruncationOverrides(**fields) if fields else None


def _z_entries(args) -> list[sc.ZEntry]:
    return [sc.ZEntry(prime=p, re=v.real, im=v.imag) for p, v in args.z]


def _emit(text: str, output: Path | None):
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        output.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def cmd_verify(args) -> int:
    req = sc.VerifyRequest(
        suite=args.suite,
        truncation=_truncation_overrides(args),
        sigma=args.sigma,
        t=args.t,
        z=_z_entries(args),
        tolerance=args.tol,
        occupation_cap=args.occupation_cap,
        seed=args.seed,
    )
    resp = handlers.handle_verify(req)
    lines = [
        json.dumps(
            {"schema_version": resp.schema_version, **r.model_dump()},
            sort_keys=True,
            default=str,
        )
        for r in resp.reports
    ]
    _emit("\n".join(lines), args.output)
    return 0 if resp.all_passed else 1


def _csv_table(schema: str, header: list[str], rows: list[list], footer: list[str] = ()) -> str:
    lines = [f"# schema={schema}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(c) for c in row))
    lines.extend(footer)
    return "\n".join(lines) + "\n"


def cmd_ncs(args) -> int:
    if args.sigma is None:
        raise DivergenceError("--sigma is required (need Re s > 1/2)")
    if args.action == "amplitudes":
        req = sc.AmplitudesRequest(
            sigma=args.sigma,
            t=args.t,
            truncation=_truncation_model(args) or sc.TruncationModel(),
            z=_z_entries(args),
            limit=args.limit,
        )
        resp = handlers.handle_amplitudes(req)
        if args.format == "json":
            _emit(resp.model_dump_json(indent=2), args.output)
        else:
            _emit(
                _csv_table(
                    f"{CSV_SCHEMA_PREFIX}.ncs.amplitudes.v1",
                    ["k", "re", "im", "prob"],
                    [[r.k, r.re, r.im, r.prob] for r in resp.rows],
                    footer=[f"# residual_mass={_fmt(resp.residual_mass)}"],
                ),
                args.output,
            )
        return 0
    if args.action == "pmf":
        req = sc.PmfRequest(sigma=args.sigma, t=args.t, n_max=args.n_max)
        resp = handlers.handle_pmf(req)
        if args.format == "json":
            _emit(resp.model_dump_json(indent=2), args.output)
        else:
            _emit(
                _csv_table(
                    f"{CSV_SCHEMA_PREFIX}.ncs.pmf.v1",
                    ["n", "probability"],
                    [[r.n, r.probability] for r in resp.rows],
                    footer=[f"# total={_fmt(resp.total)}"],
                ),
                args.output,
            )
        return 0
    req = sc.ExpectRequest(
        sigma=args.sigma,
        t=args.t,
        observable=args.observable,
        truncation=_truncation_model(args) or sc.TruncationModel(),
        z=_z_entries(args),
        U=args.U,
        mu_chem=args.mu_chem,
        tau=args.tau,
        order=args.order,
    )
    resp = handlers.handle_expect(req)
    if args.format == "json":
        _emit(resp.model_dump_json(indent=2), args.output)
    else:
        _emit(
            _csv_table(
                f"{CSV_SCHEMA_PREFIX}.ncs.expect.v1",
                ["observable", "closed_form", "truncated", "tolerance", "tail_bound"],
                [[resp.observable, resp.closed_form,
                  "" if resp.truncated is None else resp.truncated,
                  resp.tolerance, resp.tail_bound]],
            ),
            args.output,
        )
    return 0


def _spectrum_csv(resp: sc.SpectrumResponse) -> str:
    meta = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(resp.metadata.items()))
    return _csv_table(
        f"{CSV_SCHEMA_PREFIX}.spectrum.v1,{meta}",
        ["tau", "mode_rank", "eigenvalue", "alpha"],
        [
            [r.tau, r.mode_rank, r.eigenvalue, " ".join(str(a) for a in r.alpha)]
            for r in resp.rows
        ],
    )


def cmd_spectrum(args) -> int:
    if args.figure1:
        args.outdir.mkdir(parents=True, exist_ok=True)
        written = []
        for delta in (0.0, 1.0):
            req = sc.SpectrumRequest(
                N=5, n=3, gamma=1.0, delta=delta,
                tau_min=0.0, tau_max=1.2, tau_step=0.01, m_lowest=15,
                sigma=args.sigma, t=args.t,
            )
            resp = handlers.handle_spectrum(req)
            path = args.outdir / f"figure1_delta{int(delta)}.csv"
            path.write_text(_spectrum_csv(resp), encoding="utf-8")
            written.append(str(path))
        sys.stdout.write("\n".join(written) + "\n")
        return 0
    req = sc.SpectrumRequest(
        N=args.sites, n=args.particles, gamma=args.gamma, delta=args.delta,
        tau=args.tau, tau_min=args.tau_min, tau_max=args.tau_max,
        tau_step=args.tau_step, m_lowest=args.m_lowest,
        sigma=args.sigma, t=args.t,
    )
    if args.transitions:
        resp = handlers.handle_transitions(req)
        if args.format == "json":
            _emit(resp.model_dump_json(indent=2), args.output)
        else:
            meta = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(resp.metadata.items()))
            _emit(
                _csv_table(
                    f"{CSV_SCHEMA_PREFIX}.spectrum.transitions.v1,{meta}",
                    ["tau_low", "tau_high", "old_alpha", "new_alpha"],
                    [
                        [
                            t.tau_low,
                            t.tau_high,
                            " ".join(str(a) for a in t.old_alpha),
                            " ".join(str(a) for a in t.new_alpha),
                        ]
                        for t in resp.transitions
                    ],
                ),
                args.output,
            )
        return 0
    resp = handlers.handle_spectrum(req)
    if args.format == "json":
        _emit(resp.model_dump_json(indent=2), args.output)
    else:
        _emit(_spectrum_csv(resp), args.output)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "ncs":
            return cmd_ncs(args)
        if args.command == "spectrum":
            return cmd_spectrum(args)
        if args.command == "serve":
            return cmd_serve(args)
        parser.error(f"unknown command {args.command!r}")
    except (DivergenceError, QuadratureUnderResolved, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalFailure, ResourceCapExceeded, TruncationViolation) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
