"""
Command line front end: enc, dec and metrics.

Results are printed to stdout as tab-separated lines; diagnostics go to stderr through logging.
Exit codes follow ExitStatus: 0 ok, 1 IO error, 2 bad format or usage.
"""

import logging
import os
import sys
from typing import Iterable, List, Optional

import click
from pydantic import ValidationError

from conf.config import settings
from .cliModels import CliConfig, Command
from ..codec.codec import decode_stream, encode_sequence
from ..exceptions import CodecException, ExitStatus
from ..media.media import read_frames, write_frames
from ..metrics.metrics import compare_frames
from ..metrics.metricsModels import format_db

logger = logging.getLogger(__name__)


def configure_logging(verbose: int = 0) -> None:
    """
    Sends log records to stderr; -v selects INFO, -vv DEBUG, otherwise the configured level.
    """
    level = {0: settings.log_level, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _emit(rows: Iterable[List[str]]) -> None:
    for row in rows:
        click.echo("\t".join(str(value) for value in row))


def _check_input(path: str) -> Optional[int]:
    if not os.path.isfile(path):
        logger.error("Input file <%s> does not exist.", path)
        return ExitStatus.IO
    return None


def _guarded(run):
    def wrapper(config: CliConfig) -> int:
        try:
            return run(config)
        except CodecException as error:
            logger.error(error.detail)
            return error.exit_code
        except ValidationError as error:
            logger.error("Invalid settings: %s", error)
            return ExitStatus.FORMAT
        except OSError as error:
            logger.error("I/O error: %s", error)
            return ExitStatus.IO

    wrapper.__name__ = run.__name__
    wrapper.__doc__ = run.__doc__
    return wrapper


@_guarded
def run_encode(config: CliConfig) -> int:
    """
    Encodes a Y4M, PGM or PPM file into a DLK1 stream.

    Prints one line per frame (index, bytes, weighted PSNR of the reconstruction) and a total line.

    Args:
        config (CliConfig): The invocation.

    Returns:
        int: The exit code.
    """
    status = _check_input(config.input)
    if status is not None:
        return status
    frames = read_frames(config.input)
    encoder_config = config.cast_to_encoder_config(settings.lambda_scale)
    encoder_config.verify = encoder_config.verify or settings.verify_roundtrip
    encoded = encode_sequence(frames, encoder_config, config.threads)
    with open(config.output, "wb") as handle:
        for frame in encoded:
            handle.write(frame.data)
    rows = []
    for index, (source, frame) in enumerate(zip(frames, encoded)):
        rows.append(["frame", index, frame.size, format_db(compare_frames([source], [frame.reconstruction]).weighted)])
    total = compare_frames(frames, [frame.reconstruction for frame in encoded])
    rows.append(["total", len(encoded), sum(frame.size for frame in encoded), format_db(total.weighted)])
    _emit(rows)
    logger.info("encoded %d frames into <%s>", len(encoded), config.output)
    return ExitStatus.OK


@_guarded
def run_decode(config: CliConfig) -> int:
    """
    Decodes a DLK1 stream into a Y4M, PGM or PPM file.

    Args:
        config (CliConfig): The invocation.

    Returns:
        int: The exit code.
    """
    status = _check_input(config.input)
    if status is not None:
        return status
    with open(config.input, "rb") as handle:
        data = handle.read()
    frames = decode_stream(data, config.threads)
    write_frames(config.output, frames)
    _emit([["frames", len(frames)]])
    return ExitStatus.OK


@_guarded
def run_metrics(config: CliConfig) -> int:
    """
    Prints the per-plane and weighted PSNR of config.output measured against config.input.

    Args:
        config (CliConfig): The invocation; input is the reference, output the distorted file.

    Returns:
        int: The exit code.
    """
    for path in (config.input, config.output):
        status = _check_input(path)
        if status is not None:
            return status
    report = compare_frames(read_frames(config.input), read_frames(config.output))
    _emit(report.rows())
    return ExitStatus.OK


def _invoke(run, **values) -> None:
    configure_logging(values.get("verbose", 0))
    try:
        config = CliConfig(**values)
    except ValidationError as error:
        logger.error("Invalid arguments: %s", error)
        raise click.exceptions.Exit(ExitStatus.FORMAT)
    raise click.exceptions.Exit(run(config))


@click.command("enc")
@click.option("-q", "--qi", type=int, default=settings.default_qi, show_default=True, help="Quantizer index 0..63.")
@click.option("--dering", default=None, help="Global dering threshold 0..255, or 'off'.")
@click.option("--no-cfl", "no_cfl", is_flag=True, help="Disable chroma-from-luma prediction.")
@click.option("--threads", type=int, default=1, show_default=True, help="Frames encoded in parallel.")
@click.option("--min-block", "min_block", type=int, default=settings.min_block_size, show_default=True,
              help="Smallest transform size the encoder may choose.")
@click.option("--verify", is_flag=True, help="Decode the output again and fail on any mismatch.")
@click.option("-v", "--verbose", count=True, help="More diagnostics on stderr.")
@click.option("-i", "--input", "input_path", required=True, help="Y4M, PGM or PPM source.")
@click.option("-o", "--output", "output_path", required=True, help="DLK1 stream to write.")
def enc(qi, dering, no_cfl, threads, min_block, verify, verbose, input_path, output_path):
    """
    Encode an image or Y4M sequence.
    """
    _invoke(run_encode, command=Command.ENCODE, input=input_path, output=output_path, qi=qi, dering=dering,
            cfl=not no_cfl, threads=threads, min_block_size=min_block, verify=verify, verbose=verbose)


@click.command("dec")
@click.option("--threads", type=int, default=1, show_default=True, help="Frames decoded in parallel.")
@click.option("-v", "--verbose", count=True, help="More diagnostics on stderr.")
@click.option("-i", "--input", "input_path", required=True, help="DLK1 stream.")
@click.option("-o", "--output", "output_path", required=True, help="Y4M, PGM or PPM file to write.")
def dec(threads, verbose, input_path, output_path):
    """
    Decode a DLK1 stream.
    """
    _invoke(run_decode, command=Command.DECODE, input=input_path, output=output_path, threads=threads,
            verbose=verbose)


@click.command("metrics")
@click.option("-v", "--verbose", count=True, help="More diagnostics on stderr.")
@click.argument("reference")
@click.argument("distorted")
def metrics(verbose, reference, distorted):
    """
    Print the PSNR of DISTORTED against REFERENCE.
    """
    _invoke(run_metrics, command=Command.METRICS, input=reference, output=distorted, verbose=verbose)
