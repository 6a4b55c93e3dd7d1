"""
Grid search of the lapping filter coefficients by 1-D coding gain on an AR(1) source.

Run from the repository root: python -m scripts.lapping_search --rho 0.95 --size 8
"""

import logging

import click

from src.transforms.transformModels import LappedFilterParams
from src.transforms.transforms import ar1_coding_gain

logger = logging.getLogger(__name__)


def search(size: int, rho: float, scales, shears):
    """
    Scores every (scale, outer shear, inner shear) combination.

    Args:
        size (int): Block size.
        rho (float): AR(1) correlation.
        scales: Scale numerators over 64.
        shears: Shear values over 64, used for both shears.

    Returns:
        list: (gain, params) pairs, best first.
    """
    results = []
    for scale in scales:
        for outer in shears:
            for inner in shears:
                params = LappedFilterParams(scale_num=scale, scale_den=64, shear_outer=outer, shear_inner=inner)
                results.append((ar1_coding_gain(size, rho, params), params))
    results.sort(key=lambda item: -item[0])
    return results


@click.command()
@click.option("--size", type=int, default=8, show_default=True)
@click.option("--rho", type=float, default=0.95, show_default=True)
@click.option("--top", type=int, default=10, show_default=True)
def main(size, rho, top):
    logging.basicConfig(level=logging.INFO)
    baseline = ar1_coding_gain(size, rho)
    logger.info("plain DCT-%d: %.4f dB", size, baseline)
    results = search(size, rho, range(64, 129, 8), range(0, 65, 4))
    click.echo("gain_db\tscale_num\tshear_outer\tshear_inner")
    for gain, params in results[:top]:
        click.echo(f"{gain:.4f}\t{params.scale_num}\t{params.shear_outer}\t{params.shear_inner}")


if __name__ == "__main__":
    main()
