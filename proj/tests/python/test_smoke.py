# Copyright 2026 The Striplab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import datetime
import json
import shutil
import socket

import pytest

import striplab


def test_canonicalize_and_upgrade():
    u = striplab.canonicalize("HTTP://EX.TEST:8080/a?b=1")
    assert (u.scheme, u.host, u.port, u.path, u.query) == (
        striplab.Scheme.http, "ex.test", 8080, "/a", "b=1")
    assert striplab.to_https(striplab.canonicalize("ex.test/login")).serialize() == (
        "https://ex.test/login")
    with pytest.raises(striplab.InvalidUrl):
        striplab.canonicalize("http://user@ex.test/")
    with pytest.raises(striplab.NotUpgradeable):
        striplab.to_https(striplab.canonicalize("ftp://ex.test/"))
    assert issubclass(striplab.InvalidUrl, striplab.StriplabError)


def test_rewrite_operations():
    record = striplab.TamperRecord()
    out = striplab.rewrite_body(b'<a href="https://ex.test/login">', "text/html", record)
    assert out == b'<a href="http://ex.test/login">'
    assert record.entries() == [("ex.test", "/login")]
    assert striplab.rewrite_body(b"https://x", "image/png", record) == b"https://x"
    headers = striplab.rewrite_location([("Location", "HTTPS://EX.TEST/x")], record)
    assert headers == [("Location", "http://EX.TEST/x")]
    assert record.contains("ex.test", "/x")
    assert striplab.strip_secure_attribute("sid=1; Secure; HttpOnly") == "sid=1; HttpOnly"
    assert striplab.rewrite_set_cookie([("Set-Cookie", "a=1; secure")]) == [("Set-Cookie", "a=1")]


def test_decide_and_check_response():
    open_, closed = striplab.ProbeOutcome.open, striplab.ProbeOutcome.closed
    report = striplab.ProbeReport(striplab.PortProbe(80, closed), striplab.PortProbe(443, open_))
    assert report.counter == 1
    assert striplab.decide(report) == striplab.Verdict.https_available
    body = json.loads(striplab.check_response(striplab.canonicalize("ex.test/a"), report))
    assert body["verdict"] == "https_available"
    assert body["upgrade_url"] == "https://ex.test/a"
    assert body["port80"] == "closed"


def test_probe_port_open_and_closed():
    listener = socket.socket()
    listener.bind(("127.0.0.1", 0))
    listener.listen(4)
    port = listener.getsockname()[1]
    assert striplab.probe_port("127.0.0.1", port, 1000).outcome == striplab.ProbeOutcome.open
    listener.close()
    assert striplab.probe_port("127.0.0.1", port, 1000).outcome == striplab.ProbeOutcome.closed
    assert striplab.resolve("localhost") == "127.0.0.1"


def test_capture_round_trip(tmp_path):
    ts = datetime.datetime(2011, 10, 20, 10, 39, 22, 142000)
    entry = striplab.CaptureEntry(ts, True, "accounts.google.com", "POST",
                                  b"Passwd=08BCEXXX\n\x00\xff")
    data = striplab.serialize_entry(entry)
    assert data.startswith(b"2011-10-20 10:39:22,142 SECURE POST Data (accounts.google.com):")
    (parsed,) = striplab.parse_capture_log(data)
    assert parsed.body == entry.body and parsed.secure
    log = tmp_path / "capture.log"
    log.write_bytes(data)
    hits = striplab.scan_for_marker(log, b"08BCEXXX")
    assert [(h["host"], h["secure"]) for h in hits] == [("accounts.google.com", True)]
    with pytest.raises(striplab.MalformedLog):
        striplab.parse_capture_log(b"garbage\n")


@pytest.mark.parametrize("name", ["naive", "enforced"])
def test_scenarios(name):
    report = json.loads(striplab.run_scenario(name))
    shutil.rmtree(report["run_dir"], ignore_errors=True)
    assert report["passed"], report
