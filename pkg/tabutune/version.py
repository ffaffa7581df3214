import packaging.version

__version__ = '0.2.0'
version = packaging.version.Version(__version__)
