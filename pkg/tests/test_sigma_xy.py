from hypothesis import given

from smlmsim.optics import (AstigmaticPsf,
                            sigma_xy)
from tests import strategies


@given(strategies.depths, strategies.psfs)
def test_basic(z_nm: float, psf: AstigmaticPsf) -> None:
    sigma_x, sigma_y = sigma_xy(z_nm, psf)

    assert sigma_x >= psf.sigma0_nm
    assert sigma_y >= psf.sigma0_nm


@given(strategies.depths, strategies.psfs)
def test_axial_mirror(z_nm: float, psf: AstigmaticPsf) -> None:
    sigma_x, sigma_y = sigma_xy(z_nm, psf)
    mirrored_sigma_x, mirrored_sigma_y = sigma_xy(-z_nm, psf)

    assert mirrored_sigma_x == sigma_y
    assert mirrored_sigma_y == sigma_x


@given(strategies.psfs)
def test_focal_planes(psf: AstigmaticPsf) -> None:
    sigma_x, _ = sigma_xy(psf.gamma_nm, psf)
    _, sigma_y = sigma_xy(-psf.gamma_nm, psf)

    assert sigma_x == psf.sigma0_nm
    assert sigma_y == psf.sigma0_nm
