"""Command-line front end.

The CLI is a thin client over the service layer: it builds the same request
models the HTTP endpoints accept, runs them in-process by default, or relays
them to a running service when --server is given.  Exit codes are the stable
error codes from holotet.errors (0 success, 2 bad input, >= 10 domain
errors); `holotet verify-paper` exits 1 if any golden check fails.
"""

from __future__ import annotations

import argparse
import json
import sys

from pydantic import ValidationError

from . import handlers
from .datasets import list_datasets, load_dataset
from .errors import HolotetError, InputDocumentError
from .schemas import (
    FlatCheckRequest,
    ForwardRequest,
    GramRequest,
    HolonomyRequest,
    ToleranceOptions,
)


def _read_document(args) -> dict:
    if getattr(args, "dataset", None):
        return load_dataset(args.dataset)
    path = getattr(args, "input", None)
    if path is None:
        raise InputDocumentError("provide --input FILE (or '-' for stdin) or --dataset NAME")
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InputDocumentError(f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputDocumentError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                                 f"{exc.msg}")


def _options(args, doc: dict) -> ToleranceOptions:
    base = doc.get("options", {}) if isinstance(doc, dict) else {}
    opts = ToleranceOptions(**base)
    if args.tolerance is not None:
        opts.tolerance = args.tolerance
        opts.closure_tolerance = args.tolerance
        opts.exceptional_tolerance = args.tolerance
    if args.class_tolerance is not None:
        opts.class_tolerance = args.class_tolerance
    if args.exact:
        opts.exact = True
    return opts


def _emit(args, model) -> None:
    doc = model.model_dump()
    if args.format == "json":
        print(canonical_json(doc))
    else:
        _print_text(doc)


def canonical_json(doc) -> str:
    """Canonical wire form: fixed key order, lossless float repr."""
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False)


def _print_text(doc, indent: int = 0) -> None:
    pad = "  " * indent
    if isinstance(doc, dict):
        for key, value in doc.items():
            if isinstance(value, (dict, list)) and value and \
                    isinstance(value if isinstance(value, dict) else value[0], (dict, list)):
                print(f"{pad}{key}:")
                _print_text(value, indent + 1)
            else:
                print(f"{pad}{key}: {value}")
    elif isinstance(doc, list):
        for value in doc:
            _print_text(value, indent)


def _remote(args, path: str, payload: dict | None) -> int:
    import httpx

    url = args.server.rstrip("/") + path
    try:
        if payload is None:
            response = httpx.get(url, timeout=300.0)
        else:
            response = httpx.post(url, json=payload, timeout=300.0)
    except httpx.HTTPError as exc:
        sys.stderr.write(f"error: cannot reach {url}: {exc}\n")
        return 1
    body = response.json()
    if response.status_code >= 400:
        sys.stderr.write(f"error: {body.get('error')}: {body.get('message')}\n")
        return int(body.get("code", 1))
    if args.format == "json":
        print(canonical_json(body))
    else:
        _print_text(body)
    return 0


def _cmd_reconstruct(args) -> int:
    doc = _read_document(args)
    if args.derive_fourth:
        doc["derive_fourth"] = True
    req = HolonomyRequest(
        kind=doc.get("kind", "so12"),
        matrices=doc["matrices"],
        derive_fourth=doc.get("derive_fourth", False),
        options=_options(args, doc),
    )
    if doc.get("exact"):
        req.options.exact = True
    if args.exact:
        req.options.exact = True
    if args.server:
        return _remote(args, "/reconstruct", req.model_dump())
    _emit(args, handlers.run_reconstruct(req))
    return 0


def _gram_request(args, doc: dict) -> GramRequest:
    return GramRequest(
        upper=doc["upper"],
        sigma=args.sigma if args.sigma is not None else doc.get("sigma"),
        options=_options(args, doc),
    )


def _cmd_forward(args) -> int:
    doc = _read_document(args)
    if "upper" in doc:
        req = ForwardRequest(gram=_gram_request(args, doc), options=_options(args, doc))
    elif "tetrahedron" in doc or "vertices" in doc:
        tet = doc.get("tetrahedron", doc)
        req = ForwardRequest(tetrahedron=tet, options=_options(args, doc))
    else:
        raise InputDocumentError("forward input needs 'upper' (Gram) or a tetrahedron")
    if args.server:
        return _remote(args, "/forward", req.model_dump())
    _emit(args, handlers.run_forward(req))
    return 0


def _cmd_classify(args) -> int:
    doc = _read_document(args)
    req = _gram_request(args, doc)
    if args.server:
        return _remote(args, "/classify", req.model_dump())
    _emit(args, handlers.run_classify(req))
    return 0


def _cmd_roundtrip(args) -> int:
    doc = _read_document(args)
    req = _gram_request(args, doc)
    if args.server:
        return _remote(args, "/roundtrip", req.model_dump())
    _emit(args, handlers.run_roundtrip(req))
    return 0


def _cmd_flatcheck(args) -> int:
    doc = _read_document(args)
    req = FlatCheckRequest(**doc)
    if args.server:
        return _remote(args, "/flatcheck", req.model_dump())
    _emit(args, handlers.run_flatcheck(req))
    return 0


def _cmd_verify_paper(args) -> int:
    if args.server:
        return _remote(args, "/verify-paper", None)
    resp = handlers.run_verify_paper()
    if args.format == "json":
        print(canonical_json(resp.model_dump()))
    else:
        for row in resp.rows:
            mark = "PASS" if row.status == "pass" else "FAIL"
            detail = f"  [{row.detail}]" if row.detail else ""
            print(f"{mark}  {row.dataset:28s} {row.check:32s} {row.measured:.3e}{detail}")
        print(f"{resp.passed} passed, {resp.failed} failed")
    return 0 if resp.all_passed else 1


def _cmd_datasets(args) -> int:
    for name in list_datasets():
        print(name)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("holotet.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holotet",
        description="Reconstruct convex constant-curvature Lorentzian tetrahedra "
                    "from SO+(1,2)/SL(2,R) face holonomies.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, gram=False):
        p.add_argument("--input", "-i", help="input JSON file, or '-' for stdin")
        p.add_argument("--dataset", "-d", help="bundled dataset name")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--tolerance", type=float, default=None,
                       help="residual/closure tolerance (default 1e-9)")
        p.add_argument("--class-tolerance", type=float, default=None,
                       help="classification tolerance (default 1e-7)")
        p.add_argument("--exact", action="store_true",
                       help="exact rational arithmetic where possible")
        p.add_argument("--server", help="relay to a running service at this base URL")
        if gram:
            p.add_argument("--sigma", type=int, choices=(-1, 1), default=None)

    p = sub.add_parser("reconstruct", help="holonomies -> tetrahedron report")
    common(p)
    p.add_argument("--derive-fourth", action="store_true",
                   help="derive the fourth holonomy from closure")
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("forward", help="Gram/tetrahedron -> face holonomies and lifts")
    common(p, gram=True)
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("classify", help="Gram -> sector report")
    common(p, gram=True)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("roundtrip", help="Gram -> holonomies -> Gram comparison")
    common(p, gram=True)
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser("flatcheck", help="flat closure and curvature scaling checks")
    common(p)
    p.set_defaults(func=_cmd_flatcheck)

    p = sub.add_parser("verify-paper", help="run all bundled golden datasets")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--server", help="relay to a running service")
    p.set_defaults(func=_cmd_verify_paper)

    p = sub.add_parser("datasets", help="list bundled dataset names")
    p.set_defaults(func=_cmd_datasets)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputDocumentError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValidationError as exc:
        sys.stderr.write(f"error: invalid request document: {exc}\n")
        return 2
    except KeyError as exc:
        sys.stderr.write(f"error: missing field {exc} in input document\n")
        return 2
    except HolotetError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
