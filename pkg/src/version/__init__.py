try:
    from ._version import version
except ImportError:  # source tree without a setuptools_scm build
    from importlib.metadata import PackageNotFoundError, version as _dist_version

    try:
        version = _dist_version("abel-monodromy-lab")
    except PackageNotFoundError:
        version = "0.0.0"

__version__ = version
