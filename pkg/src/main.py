import click

import conf.config

from .cli.cli import dec, enc, metrics


description = """
DlkCodec encodes still images and intra-only Y4M sequences with lapped transforms, Haar DC
coding, perceptual vector quantization, chroma-from-luma and directional deringing.

\b
Commands:
- enc: Y4M/PGM/PPM -> DLK1 stream, prints bytes and PSNR per frame.
- dec: DLK1 stream -> Y4M/PGM/PPM.
- metrics: per-plane and weighted PSNR of two files.
"""


@click.group(help=description)
@click.version_option("1.0", prog_name="DlkCodec")
def app():
    pass


app.add_command(enc)
app.add_command(dec)
app.add_command(metrics)


if __name__ == "__main__":
    app()
