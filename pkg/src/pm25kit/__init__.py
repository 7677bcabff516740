"""PM2.5 analytics toolkit for country-level Asian air-quality panels."""

__version__ = "0.1.0"
