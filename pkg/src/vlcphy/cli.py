"""Command-line interface: a thin HTTP client over the service API.

Every subcommand talks to the FastAPI service. With ``--server`` (or the
``VLCPHY_SERVER`` environment variable) it targets a running instance;
otherwise it mounts the application in-process, so the CLI works standalone.

Exit codes: 0 success, 1 decode/transfer failure, 2 usage error.
"""

from __future__ import annotations

import asyncio
import base64
import json
import sys
from pathlib import Path

import click
import httpx
import numpy as np

from .modem import Waveform
from .modes import Phy, lookup_mode
from .wavefile import dimming_from_dict, dimming_to_dict, read_waveform, sidecar_path, write_waveform


class _InProcessTransport:
    """Serve requests straight from the ASGI app; no socket, no server."""

    def __init__(self):
        from .service import app

        self._app = app

    def request(self, method: str, path: str, **kwargs) -> httpx.Response:
        async def run() -> httpx.Response:
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://vlcphy.internal", timeout=600.0
            ) as client:
                return await client.request(method, path, **kwargs)

        return asyncio.run(run())


class ApiClient:
    """HTTP client with an in-process fallback when no server is given."""

    def __init__(self, server: str | None):
        self._http = httpx.Client(base_url=server, timeout=600.0) if server else None
        self._local = _InProcessTransport() if not server else None

    def _request(self, method: str, path: str, **kwargs) -> httpx.Response:
        if self._http is not None:
            return self._http.request(method, path, **kwargs)
        return self._local.request(method, path, **kwargs)

    def _check(self, resp: httpx.Response) -> dict:
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except Exception:
                detail = resp.text
            raise click.UsageError(str(detail))
        return resp.json()

    def get(self, path: str, **params) -> dict:
        return self._check(
            self._request("GET", path, params={k: v for k, v in params.items() if v is not None})
        )

    def post(self, path: str, payload: dict) -> dict:
        return self._check(self._request("POST", path, json=payload))


pass_client = click.make_pass_decorator(ApiClient)


def mode_options(fn):
    fn = click.option("--phy", default="PHY-I", show_default=True, help="PHY type (I/II).")(fn)
    fn = click.option("--mode", "mode_index", default=0, show_default=True, help="Mode index within the PHY.")(fn)
    return fn


def dimming_options(fn):
    fn = click.option("--dimming", "dimming_level", default=50, show_default=True, help="Target brightness percent.")(fn)
    fn = click.option(
        "--ook-method",
        default="level-redefinition",
        show_default=True,
        type=click.Choice(["level-redefinition", "compensation"]),
        help="How OOK modes reach the dimming target.",
    )(fn)
    fn = click.option("--comp-brightness", default=0, show_default=True, help="Compensation symbol level percent.")(fn)
    return fn


def channel_options(fn):
    fn = click.option("--channel", "channel_file", type=click.Path(exists=True, dir_okay=False), help="JSON channel config file.")(fn)
    fn = click.option("--seed", default=0, show_default=True, help="RNG seed.")(fn)
    return fn


def _dimming_spec(level: int, method: str, brightness: int) -> dict:
    return {"level": level, "ook_method": method, "compensation_brightness": brightness}


def _channel_spec(channel_file: str | None) -> dict:
    if not channel_file:
        return {}
    try:
        return json.loads(Path(channel_file).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"channel file is not valid JSON: {exc}") from exc


def _read_payload(path: str) -> str:
    return base64.b64encode(Path(path).read_bytes()).decode("ascii")


def _waveform_from_model(model: dict) -> Waveform:
    raw = base64.b64decode(model["samples_b64"])
    samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    return Waveform(samples, float(model["sample_rate"]), int(model["oversample"]))


def _waveform_to_model(wave: Waveform) -> dict:
    raw = np.asarray(wave.samples, dtype="<f4").tobytes()
    return {
        "samples_b64": base64.b64encode(raw).decode("ascii"),
        "sample_rate": wave.sample_rate,
        "oversample": wave.oversample,
    }


def _print_report(report: dict) -> None:
    skip = {"payload_b64", "stages"}
    for key, value in report.items():
        if key in skip or value is None:
            continue
        click.echo(f"{key}={value}")
    for stage, passed in report.get("stages", {}).items():
        click.echo(f"stage.{stage}={'pass' if passed else 'fail'}")


@click.group()
@click.option("--server", envvar="VLCPHY_SERVER", default=None, help="Service URL; in-process when omitted.")
@click.version_option(package_name="vlcphy")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Visible-light-communication PHY toolkit."""
    ctx.obj = ApiClient(server)


@main.command()
@click.option("--phy", default=None, help="Restrict to one PHY type.")
@click.option("--machine", is_flag=True, help="One comma-separated record per line.")
@pass_client
def modes(client: ApiClient, phy: str | None, machine: bool) -> None:
    """List the operating-mode registry."""
    records = client.get("/modes", phy=phy)
    if machine:
        for r in records:
            rs_n = r["rs_n"] if r["rs_n"] is not None else ""
            rs_k = r["rs_k"] if r["rs_k"] is not None else ""
            cc = r["cc_rate"] or ""
            click.echo(
                f"{r['phy']},{r['index']},{r['modulation']},{r['rll']},"
                f"{r['clock_hz']:g},{rs_n},{rs_k},{cc},{r['data_rate_bps']:.6g}"
            )
        return
    header = f"{'phy':7} {'idx':>3} {'modulation':10} {'rll':10} {'clock':>10} {'RS':>12} {'CC':>4} {'rate':>12}"
    click.echo(header)
    click.echo("-" * len(header))
    for r in records:
        rs = f"({r['rs_n']},{r['rs_k']})" if r["rs_n"] is not None else "-"
        cc = r["cc_rate"] or "-"
        click.echo(
            f"{r['phy']:7} {r['index']:>3} {r['modulation']:10} {r['rll']:10} "
            f"{r['clock_hz']:>10g} {rs:>12} {cc:>4} {r['data_rate_bps']:>12.6g}"
        )


@main.command("describe-fec")
@pass_client
def describe_fec(client: ApiClient) -> None:
    """Print coding parameters for cross-implementation checking."""
    fec = client.get("/fec")
    click.echo(f"convolutional: K={fec['cc_constraint_length']} generators(octal)={','.join(fec['cc_generators_octal'])} tail_bits={fec['cc_tail_bits']}")
    for rate, pat in fec["cc_rate_patterns"].items():
        click.echo(
            f"rate {rate}: {pat['input_bits']} in -> {pat['output_bits']} out, "
            f"mother-bit repeats {pat['mother_bit_repeats']}"
        )
    for rs in fec["rs_codes"]:
        click.echo(f"reed-solomon: RS({rs['n']},{rs['k']}) over {rs['field']}")
    click.echo(f"gf16_primitive_poly={fec['gf16_primitive_poly']}")
    click.echo(f"gf256_primitive_poly={fec['gf256_primitive_poly']}")
    click.echo(f"crc_poly={fec['crc_poly']} crc_init={fec['crc_init']}")


@main.command()
@click.argument("payload_file", type=click.Path(exists=True, dir_okay=False))
@mode_options
@click.option("--dimming", "dimming_level", default=100, show_default=True, help="Dimming level recorded in the header.")
@click.option("--topology", default=0, show_default=True, help="Synchronization topology index (0-3).")
@click.option("--dump", is_flag=True, help="Print the section-labelled frame hex dump.")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write chips (one uint8 per chip) to this file.")
@pass_client
def encode(client, payload_file, phy, mode_index, dimming_level, topology, dump, out) -> None:
    """Assemble a frame from PAYLOAD_FILE and report its chip layout."""
    resp = client.post(
        "/frames/encode",
        {
            "phy": phy,
            "mode_index": mode_index,
            "payload_b64": _read_payload(payload_file),
            "dimming_level": dimming_level,
            "topology": topology,
        },
    )
    sections = resp["sections"]
    click.echo(f"mode={resp['mode']['label']}")
    click.echo(
        f"chips shr={sections['shr_chips']} phr={sections['phr_chips']} "
        f"psdu={sections['psdu_chips']} total={sections['total_chips']} "
        f"efficiency={resp['efficiency']:.4f}"
    )
    if dump:
        click.echo(resp["hex_dump"])
    if out:
        Path(out).write_bytes(base64.b64decode(resp["chips_b64"]))
        click.echo(f"chips written to {out}")


@main.command()
@click.argument("payload_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="Output waveform file (sidecar JSON written alongside).")
@mode_options
@dimming_options
@click.option("--oversample", default=None, type=int, help="Samples per chip (defaults per modulation).")
@click.option("--topology", default=0, show_default=True)
@pass_client
def modulate(client, payload_file, out, phy, mode_index, dimming_level, ook_method, comp_brightness, oversample, topology) -> None:
    """Modulate PAYLOAD_FILE into an intensity waveform file."""
    dimming = _dimming_spec(dimming_level, ook_method, comp_brightness)
    resp = client.post(
        "/frames/modulate",
        {
            "phy": phy,
            "mode_index": mode_index,
            "payload_b64": _read_payload(payload_file),
            "dimming": dimming,
            "oversample": oversample,
            "topology": topology,
        },
    )
    wave = _waveform_from_model(resp["waveform"])
    mode = lookup_mode(Phy.parse(resp["mode"]["phy"]), resp["mode"]["index"])
    write_waveform(out, wave, mode, dimming_from_dict(dimming))
    click.echo(
        f"wrote {wave.samples.size} samples to {out} (+ {sidecar_path(out).name}); "
        f"mean intensity {resp['mean_intensity']:.4f}, "
        f"compensation chips {resp['compensation_chips']}"
    )


@main.command()
@click.argument("wave_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--modulation", default=None, type=click.Choice(["OOK", "VPPM"], case_sensitive=False), help="Defaults to the sidecar mode's modulation.")
@click.option("--phase", default=0, show_default=True, help="Sampling phase offset.")
@click.option("--out", "-o", type=click.Path(dir_okay=False), help="Write the chip string to a file instead of stdout.")
@pass_client
def demodulate(client, wave_file, modulation, phase, out) -> None:
    """Hard-decide chips from a waveform file."""
    wave, mode, _ = read_waveform(wave_file)
    if modulation is None:
        if mode is None:
            raise click.UsageError("sidecar has no mode; pass --modulation")
        modulation = mode.modulation.value
    resp = client.post(
        "/frames/demodulate",
        {"waveform": _waveform_to_model(wave), "modulation": modulation, "phase": phase},
    )
    if out:
        Path(out).write_text(resp["chips"] + "\n", encoding="utf-8")
        click.echo(f"{len(resp['chips'])} chips written to {out}")
    else:
        click.echo(resp["chips"])


@main.command()
@click.argument("wave_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False), help="File receiving the recovered payload bytes.")
@click.option("--phy", default=None, help="Defaults to the sidecar PHY.")
@click.option("--threshold", default=0.9, show_default=True, help="Frame-detection correlation threshold.")
@pass_client
def decode(client, wave_file, out, phy, threshold) -> None:
    """Receive a frame from a waveform file; emit payload and a key=value report."""
    wave, mode, dimming = read_waveform(wave_file)
    if phy is None:
        if mode is None:
            raise click.UsageError("sidecar has no mode; pass --phy")
        phy = mode.phy.value
    payload = {
        "waveform": _waveform_to_model(wave),
        "phy": phy,
        "threshold": threshold,
    }
    if dimming is not None:
        payload["dimming"] = dimming_to_dict(dimming)
    report = client.post("/frames/decode", payload)
    _print_report(report)
    if report.get("payload_b64") is not None:
        Path(out).write_bytes(base64.b64decode(report["payload_b64"]))
        click.echo(f"payload written to {out}")
    if not report["ok"]:
        sys.exit(1)


@main.command()
@click.argument("payload_file", type=click.Path(exists=True, dir_okay=False))
@mode_options
@dimming_options
@channel_options
@click.option("--oversample", default=None, type=int)
@click.option("--threshold", default=0.45, show_default=True, help="Frame-detection correlation threshold.")
@pass_client
def simulate(client, payload_file, phy, mode_index, dimming_level, ook_method, comp_brightness, channel_file, seed, oversample, threshold) -> None:
    """One frame through the simulated channel; pass iff the payload survives."""
    resp = client.post(
        "/simulate",
        {
            "phy": phy,
            "mode_index": mode_index,
            "payload_b64": _read_payload(payload_file),
            "channel": _channel_spec(channel_file),
            "dimming": _dimming_spec(dimming_level, ook_method, comp_brightness),
            "oversample": oversample,
            "seed": seed,
            "threshold": threshold,
        },
    )
    click.echo(f"ok={resp['ok']}")
    click.echo(f"chip_errors={resp['chip_errors']}/{resp['chips_compared']}")
    click.echo(f"corrected_symbols={resp['corrected_symbols']}")
    if resp["stage"]:
        click.echo(f"failed_stage={resp['stage']} ({resp['error']})")
    _print_report(resp["report"])
    if not resp["ok"]:
        sys.exit(1)


@main.command()
@mode_options
@dimming_options
@click.option("--snr", "snr_points", required=True, help="Comma-separated SNR points in dB.")
@click.option("--frames", default=100, show_default=True, help="Frames per SNR point.")
@click.option("--payload-octets", default=64, show_default=True)
@click.option("--oversample", default=None, type=int)
@click.option("--seed", default=0, show_default=True)
@pass_client
def sweep(client, phy, mode_index, dimming_level, ook_method, comp_brightness, snr_points, frames, payload_octets, oversample, seed) -> None:
    """BER/FER sweep; one CSV row per SNR point."""
    try:
        points = [float(s) for s in snr_points.split(",") if s.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad --snr list: {exc}") from exc
    if not points:
        raise click.UsageError("--snr must list at least one point")
    resp = client.post(
        "/sweep",
        {
            "phy": phy,
            "mode_index": mode_index,
            "snr_points_db": points,
            "frames_per_point": frames,
            "payload_octets": payload_octets,
            "dimming": _dimming_spec(dimming_level, ook_method, comp_brightness),
            "oversample": oversample,
            "seed": seed,
        },
    )
    click.echo("snr_db,ber,fer,ci_lo,ci_hi,corrected")
    for row in resp["csv_rows"]:
        click.echo(row)


@main.command()
@click.argument("data_file", type=click.Path(exists=True, dir_okay=False))
@mode_options
@dimming_options
@channel_options
@click.option("--oversample", default=None, type=int)
@click.option("--chunk", default=1024, show_default=True, help="Payload octets per frame.")
@pass_client
def sendfile(client, data_file, phy, mode_index, dimming_level, ook_method, comp_brightness, channel_file, seed, oversample, chunk) -> None:
    """Send DATA_FILE through the simulated link frame by frame; verify by digest."""
    data = Path(data_file).read_bytes()
    resp = client.post(
        "/sendfile",
        {
            "phy": phy,
            "mode_index": mode_index,
            "data_b64": base64.b64encode(data).decode("ascii"),
            "channel": _channel_spec(channel_file),
            "dimming": _dimming_spec(dimming_level, ook_method, comp_brightness),
            "oversample": oversample,
            "seed": seed,
            "chunk_octets": chunk,
        },
    )
    click.echo(f"frames={resp['frames_recovered']}/{resp['frames_sent']} octets={resp['octets']}")
    click.echo(f"digest_sent={resp['digest_sent']}")
    click.echo(f"digest_received={resp['digest_received']}")
    click.echo(f"ok={resp['ok']}")
    if not resp["ok"]:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("vlcphy.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
