"""AMIF-MDS analyzer: frequency-domain mutual information, MDS and DBSCAN for multivariate time series."""

__version__ = "1.0.0"
