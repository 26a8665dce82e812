"""Command-line front end; a thin client of the JSON service.

Requests are sent to the FastAPI app in-process over ASGI by default, or to
a running instance with --server.  Exit codes: 0 success (incl. verdict
Inconclusive), 1 validation failure / NotVaisman / rejected input, 2 I/O.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2


def call_service(args, method: str, path: str, payload=None):
    """Send one request; returns (status code, decoded JSON body)."""
    server = getattr(args, "server", None)
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.request(method, path, json=payload)
    else:
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())

        async def _go():
            async with httpx.AsyncClient(
                transport=transport, base_url="http://folspec.invalid", timeout=600.0
            ) as client:
                return await client.request(method, path, json=payload)

        resp = asyncio.run(_go())
    try:
        body = resp.json()
    except ValueError:
        body = {"detail": resp.text}
    return resp.status_code, body


def _fail(body) -> int:
    detail = body.get("detail", body) if isinstance(body, dict) else body
    print(f"error: {detail}", file=sys.stderr)
    return EXIT_FAIL


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def _read_json_file(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _parse_scalars(text: str, cast):
    return [cast(x) for x in text.split(",") if x.strip() != ""]


def _model_payload(args) -> dict:
    given = [x for x in (getattr(args, "model", None), getattr(args, "builtin", None)) if x]
    if len(given) != 1:
        raise SystemExit("error: provide exactly one of --model PATH or --builtin NAME")
    payload: dict = {"n": args.n, "modes": args.modes}
    if getattr(args, "tolerance", None) is not None:
        payload["tolerance"] = args.tolerance
    if getattr(args, "model", None):
        payload["model"] = _read_json_file(args.model)
    else:
        payload["builtin"] = args.builtin
    return payload


def render_page_table(table: dict) -> str:
    """One page as a grid with u as rows and v as columns."""
    q, p = table["q"], table["p"]
    grid = {(u, v): 0 for u in range(q + 1) for v in range(p + 1)}
    for u, v, d in table["dims"]:
        grid[(u, v)] = d
    mark = "  (stabilized)" if table["stabilized"] else ""
    lines = [f"E_{table['page']}{mark}"]
    header = "  u\\v " + " ".join(f"{v:>5d}" for v in range(p + 1))
    lines.append(header)
    for u in range(q + 1):
        row = " ".join(f"{grid[(u, v)]:>5d}" for v in range(p + 1))
        lines.append(f"  {u:>3d} " + row)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    payload = {"model": _read_json_file(args.path)}
    if args.tolerance is not None:
        payload["tolerance"] = args.tolerance
    status, body = call_service(args, "POST", "/models/validate", payload)
    if status != 200:
        return _fail(body)
    if args.format == "json":
        print(_dump(body))
    else:
        print(f"total dimension: {body['total_dim']}")
        print(f"max residual:    {body['max_residual']:g}")
        if body["valid"]:
            print("valid: all five d^2 = 0 relations hold")
        else:
            print("INVALID: failing cells")
            for f in body["failures"]:
                print(
                    f"  relation ({f['relation']}) at cell {tuple(f['cell'])} "
                    f"shift {tuple(f['shift'])} residual {f['residual']:g}"
                )
    return EXIT_OK if body["valid"] else EXIT_FAIL


def cmd_pages(args) -> int:
    payload = _model_payload(args)
    if args.max_page is not None:
        payload["max_page"] = args.max_page
    status, body = call_service(args, "POST", "/pages", payload)
    if status != 200:
        return _fail(body)
    if args.format == "json":
        print(_dump(body))
        return EXIT_OK
    for table in body["pages"]:
        print(render_page_table(table))
    chis = {entry["chi"] for entry in body["euler"]}
    print(f"euler characteristic per page: {sorted(chis)}")
    einf = body["e_infinity"]
    status_word = "match" if einf["ok"] else "MISMATCH"
    print(
        f"E_inf degree sums {einf['einf_degree_sums']} vs total cohomology "
        f"{einf['betti']}: {status_word}"
    )
    print(f"direct/iterated agreement: {body['direct_agreement']}")
    return EXIT_OK


def cmd_predict(args) -> int:
    payload = {
        "n": args.n,
        "betti": _parse_scalars(args.betti, int),
        "quasi_regular": args.quasi_regular,
    }
    status, body = call_service(args, "POST", "/predict", payload)
    if status != 200:
        return _fail(body)
    if args.format == "json":
        print(_dump(body))
        return EXIT_OK
    print(f"basic Betti numbers e: {body['e']}")
    print(f"mode: {body['mode']}")
    print(render_page_table(body["table"]))
    for w in body["warnings"]:
        print(f"warning: {w}")
    return EXIT_OK


def cmd_check(args) -> int:
    if args.table:
        payload: dict = {"table": _read_json_file(args.table)}
        if args.tolerance is not None:
            payload["tolerance"] = args.tolerance
    else:
        payload = _model_payload(args)
    status, body = call_service(args, "POST", "/check", payload)
    if status != 200:
        return _fail(body)
    if args.format == "json":
        print(_dump(body))
    else:
        print(f"verdict: {body['verdict']}")
        for clause in body["clauses"]:
            print(f"  {clause['name']} at cell {tuple(clause['cell'])}: {clause['detail']}")
    return EXIT_FAIL if body["verdict"] == "NotVaisman" else EXIT_OK


def cmd_adiabatic(args) -> int:
    payload = _model_payload(args)
    payload["h"] = _parse_scalars(args.h, float)
    payload["degree"] = args.degree
    status, body = call_service(args, "POST", "/adiabatic", payload)
    if status != 200:
        return _fail(body)
    if args.format == "json":
        print(_dump(body))
        return EXIT_OK
    n_eigs = len(body["entries"][0]["eigenvalues"]) if body["entries"] else 0
    gap = "" if body["gap"] is None else f"{body['gap']:.12g}"
    print(f"# degree={body['degree']} kernel_dim={body['kernel_dim']} gap={gap}")
    print(f"# e2_degree_sum={body['e2_degree_sum']}")
    header = ["h", "small_count"] + [f"lambda_{i}" for i in range(1, n_eigs + 1)]
    print(",".join(header))
    for entry in body["entries"]:
        row = [f"{entry['h']:.12g}", str(entry["small_count"])]
        row += [f"{x:.12g}" for x in entry["eigenvalues"]]
        print(",".join(row))
    return EXIT_OK


def cmd_emit(args) -> int:
    payload = {"builtin": args.builtin, "n": args.n, "modes": args.modes}
    if args.tolerance is not None:
        payload["tolerance"] = args.tolerance
    status, body = call_service(args, "POST", "/models/emit", payload)
    if status != 200:
        return _fail(body)
    text = _dump(body["model"]) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_matrix_a(args) -> int:
    payload: dict = {"n": args.n}
    if args.diophantine_height is not None:
        payload["diophantine_height"] = args.diophantine_height
    status, body = call_service(args, "POST", "/matrix-a", payload)
    if status != 200:
        return _fail(body)
    if args.format == "json":
        print(_dump(body))
        return EXIT_OK
    print(f"diagonal d_1..d_{2 * body['n'] + 1}: {body['diagonal']}")
    print("A =")
    for row in body["matrix"]:
        print("  [" + " ".join(f"{x:>8d}" for x in row) + "]")
    print(f"det A = {body['det']}")
    print("eigenvalues: " + " ".join(f"{x:.10g}" for x in body["eigenvalues"]))
    print(f"leafwise product lambda = {body['leafwise_product']:.10g}")
    if body.get("diophantine"):
        for probe in body["diophantine"]:
            minima = ", ".join(
                f"delta={d}: {probe['minima'][d]:.6g} at m={tuple(probe['witnesses'][d])}"
                for d in sorted(probe["minima"])
            )
            print(f"diophantine v_{int(probe['vector_index']) + 1}: {minima}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_model_source(sub, with_modes=True):
    sub.add_argument("--builtin", choices=["kodaira", "suspension"], help="builtin model")
    sub.add_argument("--model", metavar="PATH", help="model description JSON file")
    sub.add_argument("--n", type=int, default=1, help="suspension size parameter")
    if with_modes:
        sub.add_argument("--modes", type=int, default=2, help="Fourier mode cutoff N")
    sub.add_argument("--tolerance", type=float, default=None, help="rank tolerance override")


def _add_format(sub, choices=("table", "json"), default="table"):
    sub.add_argument("--format", choices=list(choices), default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="folspec",
        description="Spectral-sequence pages, builtin foliation models and the "
        "Vaisman obstruction; a thin client of the folspec service.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running folspec service (default: run in-process)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("validate", help="parse a model JSON and check d^2 = 0")
    sub.add_argument("path", help="model description JSON file")
    sub.add_argument("--tolerance", type=float, default=None)
    _add_format(sub)
    sub.set_defaults(func=cmd_validate)

    sub = commands.add_parser("pages", help="page tables, Euler line and E_inf check")
    _add_model_source(sub)
    sub.add_argument("--max-page", type=int, default=None, dest="max_page")
    _add_format(sub)
    sub.set_defaults(func=cmd_pages)

    sub = commands.add_parser("predict", help="E_2 prediction from Betti numbers")
    sub.add_argument("--n", type=int, required=True, help="complex-dimension parameter")
    sub.add_argument("--betti", required=True, help="comma-separated b_0..b_{2n+2}")
    sub.add_argument("--quasi-regular", action="store_true", dest="quasi_regular")
    _add_format(sub)
    sub.set_defaults(func=cmd_predict)

    sub = commands.add_parser("check", help="Vaisman obstruction verdict")
    _add_model_source(sub)
    sub.add_argument("--table", metavar="PATH", help="page-table JSON file (page 2)")
    _add_format(sub)
    sub.set_defaults(func=cmd_check)

    sub = commands.add_parser("adiabatic", help="rescaled Laplacian spectra sweep")
    _add_model_source(sub)
    sub.add_argument("--h", required=True, help="comma-separated positive h values")
    sub.add_argument("--degree", type=int, required=True, help="total form degree")
    _add_format(sub, choices=("csv", "json"), default="csv")
    sub.set_defaults(func=cmd_adiabatic)

    sub = commands.add_parser("emit", help="write a builtin model as JSON")
    sub.add_argument("--builtin", choices=["kodaira", "suspension"], required=True)
    sub.add_argument("--n", type=int, default=1)
    sub.add_argument("--modes", type=int, default=2)
    sub.add_argument("--tolerance", type=float, default=None)
    sub.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    sub.set_defaults(func=cmd_emit)

    sub = commands.add_parser("matrix-a", help="arrowhead matrix, spectrum, probes")
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument(
        "--diophantine-height", type=int, default=None, dest="diophantine_height"
    )
    _add_format(sub)
    sub.set_defaults(func=cmd_matrix_a)

    sub = commands.add_parser("serve", help="run the service with uvicorn")
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--port", type=int, default=8000)
    sub.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: unreadable JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except httpx.HTTPError as exc:
        print(f"error: service unreachable: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
