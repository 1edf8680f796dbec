"""Numerics for squared degenerate Eisenstein-series observables.

Layers, bottom-up:

* :mod:`evlab.specfun`  -- gamma / zeta / completed zeta / K-Bessel
* :mod:`evlab.maass`    -- Hecke-Maass cusp form data model and ingestion
* :mod:`evlab.lfun`     -- L(s, phi) on and off the critical line (AFE)
* :mod:`evlab.eisen2`   -- SL2(Z) geometry, Eisenstein/Maass evaluation,
                           the unfolded series computed two independent ways
* :mod:`evlab.wimu`     -- the closed inner-product formulas mu_{n,t}
* :mod:`evlab.moments`  -- t-integrated mean values, second moments, variance
* :mod:`evlab.cli`      -- the ``evlab`` command-line front end
"""

__version__ = "0.1.0"

from .specfun import QuadratureSpec, DEFAULT_SPEC  # noqa: F401
from .maass import MaassForm, load_maass_form, shipped_form_path  # noqa: F401
