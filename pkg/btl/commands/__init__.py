class UnsupportedPairingError(ValueError):
    """Command cannot run on the given domain kind."""
