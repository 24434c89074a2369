# Toolkit package version
__version__ = '0.1.0'


def _version_to_int(version_str: str) -> int:
    """
    Convert a dotted version string into the integer key used as a metrics label.

    Leading zero segments are dropped and the remaining segments concatenated,
    so '0.1.0' -> 10 and '1.2.3' -> 123. Unparseable input maps to 1.

    Args:
        version_str: Version string like '0.1.0'

    Returns:
        Integer version key
    """
    try:
        parts = [int(part) for part in version_str.split('.')]
    except (ValueError, AttributeError):
        return 1
    while parts and parts[0] == 0:
        parts.pop(0)
    if not parts:
        return 1
    return int(''.join(str(part) for part in parts))


version_as_int = _version_to_int(__version__)
