"""Command-line entry points.

Subcommands:

    simulate  run a scenario script, write every artifact plus a tally figure
    audit     run the verification checklist over persisted artifacts
    digest    recompute the zero-state or final fingerprint standalone
    tamper    flip one bit of an export artifact
    serve     start the interactive session service

The audit exit status encodes the overall verdict: 0 OK, 2 UNREADABLE,
3 SEAL_VIOLATION, 4 CODE_MISMATCH, 5 DIGEST_MISMATCH, 6 TALLY_MISMATCH,
7 NOT_AUDITABLE. Other failures exit 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .artifacts import ArtifactParseError, load_ata, load_bu
from .audit import audit_section
from .canonical import final_digest, zeresima_digest
from .device import ExportError, MemoryExport
from .faults import flip_bit_in_export
from .scripts import ScriptError, load_script
from .simulator import ScenarioAbort, run_scenario
from .types import CodeImage, Digest160, reference_code


def _load_code(path: str | None) -> CodeImage:
    if path is None:
        return reference_code()
    return CodeImage(Path(path).read_bytes())


def _parse_hex_u32(text: str) -> int:
    value = int(text, 16)
    if not 0 <= value <= 0xFFFFFFFF:
        raise ValueError(f"not a 32-bit value: {text}")
    return value


def _cmd_simulate(args: argparse.Namespace) -> int:
    script = load_script(args.script)
    code = _load_code(args.code)
    result = run_scenario(script, code)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = Path(args.script).stem

    (out / f"{base}.transcript.txt").write_text(result.transcript.render())
    (out / f"{base}.ata").write_text(result.ata.render())
    written = ["transcript.txt", "ata"]
    if result.bu is not None:
        (out / f"{base}.bu").write_text(result.bu.render())
        written.append("bu")
    if result.export_image is not None:
        (out / f"{base}.selamem").write_bytes(result.export_image)
        written.append("selamem")
    if result.code_readout is not None:
        (out / f"{base}.code.bin").write_bytes(result.code_readout)
        written.append("code.bin")
    if result.bu is not None:
        from .figures import render_tally_figure

        render_tally_figure(
            result.bu.tallies,
            f"section {result.bu.zone}:{result.bu.section}",
            out / f"{base}.tally.png",
        )
        written.append("tally.png")

    print(f"wrote {base}.{{{','.join(written)}}} to {out}")
    if result.transcript.alarms:
        for step, note in result.transcript.alarms:
            print(f"ALARM at step {step}: {note}")
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    export_image = Path(args.export).read_bytes() if args.export else None
    code = CodeImage(Path(args.code).read_bytes()) if args.code else None
    ata = load_ata(args.ata)
    bu = load_bu(args.bu)
    report = audit_section(
        export_image=export_image,
        code=code,
        published_zero=Digest160.from_hex(args.published_zero),
        published_code_crc=_parse_hex_u32(args.published_crc),
        ata=ata,
        bu=bu,
        seal_intact=not args.seal_broken,
    )

    if args.json:
        print(report.to_json(), end="")
    else:
        print(report.render_text(), end="")

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(report.render_text())
        (out / "report.json").write_text(report.to_json())
        if export_image is not None:
            try:
                export = MemoryExport.decode(export_image)
            except ExportError:
                pass
            else:
                from .figures import render_comparison_figure

                render_comparison_figure(
                    export.entries(), bu.tallies, report.overall.value,
                    out / "comparison.png",
                )
    return report.exit_code


def _cmd_digest(args: argparse.Namespace) -> int:
    if args.which == "zero":
        print(zeresima_digest(_load_code(args.code)).hex)
        return 0
    export = MemoryExport.decode(Path(args.export).read_bytes())
    print(final_digest((export.zone, export.section), export.records).hex)
    return 0


def _cmd_tamper(args: argparse.Namespace) -> int:
    data = Path(args.export).read_bytes()
    offset_s, _, bit_s = args.flip.partition(":")
    mutated = flip_bit_in_export(
        data, int(offset_s), int(bit_s), fix_crc=args.fix_crc
    )
    out = Path(args.output) if args.output else Path(args.export + ".tampered")
    out.write_bytes(mutated)
    print(f"wrote {out}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        workdir=Path(args.workdir) if args.workdir else None,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sela", description="ballot-audit device simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a scenario script")
    p.add_argument("script", help="scenario script file")
    p.add_argument("--code", help="code image file (default: built-in firmware)")
    p.add_argument("--out", default="artifacts", help="output directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("audit", help="verify a section's artifacts")
    p.add_argument("--export", help=".selamem memory export (omit if lost)")
    p.add_argument("--code", help="code image as read from the device")
    p.add_argument("--ata", required=True, help=".ata section minutes")
    p.add_argument("--bu", required=True, help=".bu boletim de urna")
    p.add_argument("--published-zero", required=True,
                   help="published zero-state fingerprint (40 hex chars)")
    p.add_argument("--published-crc", required=True,
                   help="published code CRC-32 (hex)")
    p.add_argument("--seal-broken", action="store_true",
                   help="record that the seals were found violated")
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    p.add_argument("--out", help="also write report files and figure here")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("digest", help="recompute fingerprints standalone")
    dsub = p.add_subparsers(dest="which", required=True)
    pz = dsub.add_parser("zero", help="zero-state constant of a code image")
    pz.add_argument("--code", help="code image file (default: built-in firmware)")
    pf = dsub.add_parser("final", help="final fingerprint of an export")
    pf.add_argument("--export", required=True, help=".selamem file")
    p.set_defaults(func=_cmd_digest)

    p = sub.add_parser("tamper", help="flip one bit of an export artifact")
    p.add_argument("export", help=".selamem file")
    p.add_argument("--flip", required=True, metavar="OFFSET:BIT",
                   help="bit to flip, e.g. 20:3")
    p.add_argument("--fix-crc", action="store_true",
                   help="recompute the image CRC after flipping")
    p.add_argument("-o", "--output", help="output path (default: input+.tampered)")
    p.set_defaults(func=_cmd_tamper)

    p = sub.add_parser("serve", help="start the interactive session service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--workdir", help="artifact persistence directory")
    p.add_argument("--ui-dir", help="static directory with the booth UI build")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScriptError, ArtifactParseError, ExportError, ScenarioAbort,
            OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
