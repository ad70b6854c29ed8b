from .export import ConfigurationError, Exporter, ExportError, ExportSpec, export_records

__version__ = "0.1.0"

__all__ = ["ConfigurationError", "Exporter", "ExportError", "ExportSpec", "export_records"]
