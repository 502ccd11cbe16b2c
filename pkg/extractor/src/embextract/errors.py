class ExtractionError(ValueError):
    """Bad job parameters, unusable model, or malformed inputs."""
