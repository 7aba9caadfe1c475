"""Python bindings for the striplab HTTPS-stripping testbed."""

from ._core import (
    CanonicalUrl,
    CaptureEntry,
    InvalidUrl,
    MalformedLog,
    NotUpgradeable,
    PortProbe,
    ProbeOutcome,
    ProbeReport,
    ResolutionFailure,
    Scheme,
    StriplabError,
    TamperRecord,
    Verdict,
    canonicalize,
    check_response,
    decide,
    parse_capture_log,
    probe_host,
    probe_port,
    resolve,
    rewrite_body,
    rewrite_location,
    rewrite_set_cookie,
    run_scenario,
    scan_for_marker,
    serialize_entry,
    strip_secure_attribute,
    to_https,
)

__all__ = [name for name in dir() if not name.startswith("_")]
