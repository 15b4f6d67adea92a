"""Command-line front end: thresholds, enroll, verify and campaign."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import jsonio
from .experiments import CampaignConfig, run_campaign
from .homodyne import HomodyneChannel, ProbeSet, p_in_theoretical
from .protocol import (
    CrpDatabase,
    VerificationConfig,
    e_threshold,
    enroll_exact,
    enroll_sampled,
    m_threshold,
    radii,
    verify,
)
from .scattering import ScatteringKey, generate_key, uniform_coupling
from .streams import substream

__all__ = ["main"]


def _cmd_thresholds(args) -> int:
    sigma = 1.0 / math.sqrt(2.0 * args.eta)
    channel = HomodyneChannel.from_delta_ratio(args.eta, args.delta_over_sigma)
    variance = (1.0 - args.l_over_L) / args.n_modes
    expected_enhancement = math.pi * args.n_modes / 4.0
    rho_false, rho_true = radii(args.mu_c, variance, expected_enhancement)
    print(f"sigma      = {sigma!r}")
    print(f"delta      = {channel.bin_width!r}")
    print(f"P_in       = {p_in_theoretical(channel)!r}")
    print(f"M_th       = {m_threshold(args.epsilon, args.zeta)}")
    print(f"E_th       = {e_threshold(args.mu_c, args.n_modes, args.l_over_L)!r}")
    print(f"E_expected = {expected_enhancement!r}  (mean optimal-mask enhancement)")
    print(f"rho_f      = {rho_false!r}")
    print(f"rho_t      = {rho_true!r}  (at E_expected)")
    return 0


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _cmd_enroll(args) -> int:
    config = _load_json(args.config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    n_modes = int(config["n_modes"])
    coupling = uniform_coupling(n_modes, float(config["tau"]))
    probes = ProbeSet(int(config["n_probe_states"]), float(config["mu_p"]))
    channel = HomodyneChannel.from_delta_ratio(
        float(config["eta"]), float(config["delta_over_sigma"])
    )

    if "key_path" in config:
        key = ScatteringKey.from_dict(_load_json(config["key_path"]))
    else:
        key = generate_key(
            n_modes,
            float(config["l_over_L"]),
            substream(seed, 0),
            target_mode=int(config.get("target_mode", 0)),
        )

    mode = config.get("enrollment", "exact")
    if mode == "exact":
        database = enroll_exact(key, coupling, probes, channel)
    elif mode == "sampled":
        database = enroll_sampled(
            key, coupling, probes, channel,
            int(config["per_quadrature_samples"]), substream(seed, 1),
        )
    else:
        raise ValueError(f"unknown enrollment mode {mode!r}")

    key_path = out_dir / "key.json"
    database_path = out_dir / "database.json"
    jsonio.dump(key.to_dict(), key_path)
    jsonio.dump(database.to_dict(), database_path)
    print(key_path)
    print(database_path)
    return 0


def _cmd_verify(args) -> int:
    database = CrpDatabase.from_dict(_load_json(args.database))
    key = ScatteringKey.from_dict(_load_json(args.key))
    coupling = uniform_coupling(database.mode_count, database.setup_loss)
    config = VerificationConfig(args.sessions, args.epsilon, args.zeta)
    report = verify(key, database, coupling, config, substream(args.seed, 0),
                    trace=args.trace)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / "report.json"
    jsonio.dump(report.to_dict(), report_path)
    print(report_path)
    if args.trace:
        trace_path = out_dir / "trace.csv"
        with open(trace_path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(("k", "theta", "outcome", "hit"))
            for k, theta, outcome, hit in report.session_trace:
                writer.writerow((k, repr(theta), repr(outcome), int(hit)))
        print(trace_path)
    print(f"p_in = {report.p_in!r}  P_in = {report.p_in_expected!r}  "
          f"{'ACCEPT' if report.accepted else 'REJECT'}")
    return 0 if report.accepted else 1


def _cmd_campaign(args) -> int:
    raw = _load_json(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    config = CampaignConfig.from_dict(raw)
    paths = run_campaign(config, args.out)
    for path in paths.values():
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvpuk",
        description="Simulation of continuous-variable authentication of "
                    "optical scattering keys.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    thresholds = commands.add_parser(
        "thresholds", help="print the protocol constants for a parameter set"
    )
    thresholds.add_argument("--epsilon", type=float, default=0.05)
    thresholds.add_argument("--zeta", type=float, default=0.05)
    thresholds.add_argument("--mu-c", type=float, default=2000.0,
                            help="mean challenge photons after the modulator")
    thresholds.add_argument("--n-modes", type=int, default=121)
    thresholds.add_argument("--l-over-L", type=float, default=0.2)
    thresholds.add_argument("--delta-over-sigma", type=float, default=2.0)
    thresholds.add_argument("--eta", type=float, default=0.55)
    thresholds.set_defaults(func=_cmd_thresholds)

    enroll = commands.add_parser(
        "enroll", help="generate (or load) a key and write its record database"
    )
    enroll.add_argument("--config", required=True, help="JSON config path")
    enroll.add_argument("--out", required=True, help="output directory")
    enroll.add_argument("--seed", type=int, default=None, help="override the config seed")
    enroll.set_defaults(func=_cmd_enroll)

    verify_cmd = commands.add_parser(
        "verify", help="verify a key file against a database file"
    )
    verify_cmd.add_argument("--database", required=True)
    verify_cmd.add_argument("--key", required=True)
    verify_cmd.add_argument("--sessions", type=int, default=1000)
    verify_cmd.add_argument("--epsilon", type=float, default=0.05)
    verify_cmd.add_argument("--zeta", type=float, default=0.05)
    verify_cmd.add_argument("--seed", type=int, default=0)
    verify_cmd.add_argument("--out", default=".", help="directory for the report")
    verify_cmd.add_argument("--trace", action="store_true",
                            help="also write the per-session trace CSV")
    verify_cmd.set_defaults(func=_cmd_verify)

    campaign = commands.add_parser(
        "campaign", help="run a Monte Carlo campaign into an output directory"
    )
    campaign.add_argument("--config", required=True, help="JSON config path")
    campaign.add_argument("--out", required=True, help="output directory")
    campaign.add_argument("--seed", type=int, default=None, help="override the config seed")
    campaign.set_defaults(func=_cmd_campaign)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: missing field {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
