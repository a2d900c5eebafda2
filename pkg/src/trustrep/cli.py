"""Command-line entry points: ``simulate`` and ``trustrep-serve``."""

from __future__ import annotations

import argparse
import sys

from .simulator import emit_report, load_config, run_simulation


def simulate_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run an adversarial reputation scenario and emit its report.",
    )
    parser.add_argument("--config", required=True, help="scenario config (JSON)")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument(
        "--format", default="table", choices=("json", "csv", "table"), help="report format"
    )
    args = parser.parse_args(argv)

    config = load_config(args.config)
    report = run_simulation(config)
    text = emit_report(report, args.format)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def serve_main(argv=None) -> int:
    import os

    import uvicorn

    from .service import Settings, create_app

    env = Settings.from_env()
    parser = argparse.ArgumentParser(
        prog="trustrep-serve", description="Run the reputation HTTP service."
    )
    parser.add_argument("--host", default=os.environ.get("TRUSTREP_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("TRUSTREP_PORT", "8000")))
    parser.add_argument("--journal", default=env.journal_path, help="journal file (created if absent)")
    parser.add_argument("--lexicon", default=env.lexicon_path, help="lexicon file (default: packaged)")
    parser.add_argument("--blacklist-ttl", type=int, default=env.blacklist_ttl)
    parser.add_argument("--default-k", type=int, default=env.default_k)
    parser.add_argument(
        "--test-mode", action="store_true", default=env.test_mode,
        help="accept the clock from the X-Now request header",
    )
    args = parser.parse_args(argv)

    app = create_app(Settings(
        journal_path=args.journal,
        lexicon_path=args.lexicon,
        blacklist_ttl=args.blacklist_ttl,
        default_k=args.default_k,
        test_mode=args.test_mode,
    ))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(simulate_main())
