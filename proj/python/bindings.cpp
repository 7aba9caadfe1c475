// Copyright 2026 The Striplab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/chrono.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "striplab/capture.hpp"
#include "striplab/enforcer.hpp"
#include "striplab/harness.hpp"
#include "striplab/prober.hpp"
#include "striplab/rewrite.hpp"
#include "striplab/url.hpp"

namespace py = pybind11;
using namespace striplab;

namespace {

std::vector<std::pair<std::string, std::string>> to_pairs(const Headers& headers) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& h : headers) out.emplace_back(h.name, h.value);
  return out;
}

Headers from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  Headers headers;
  for (const auto& [name, value] : pairs) headers.push_back({name, value});
  return headers;
}

PortProbe make_probe(std::uint16_t port, ProbeOutcome outcome, int latency_ms) {
  return {port, outcome, Millis{latency_ms}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "HTTPS-stripping testbed: URL canonicalization, probing, rewriting, capture";

  auto error = py::register_exception<Error>(m, "StriplabError");
  py::register_exception<InvalidUrl>(m, "InvalidUrl", error.ptr());
  py::register_exception<NotUpgradeable>(m, "NotUpgradeable", error.ptr());
  py::register_exception<ResolutionFailure>(m, "ResolutionFailure", error.ptr());
  py::register_exception<MalformedLog>(m, "MalformedLog", error.ptr());

  py::enum_<Scheme>(m, "Scheme")
      .value("http", Scheme::kHttp)
      .value("https", Scheme::kHttps)
      .value("ftp", Scheme::kFtp);

  py::class_<CanonicalUrl>(m, "CanonicalUrl")
      .def_readonly("scheme", &CanonicalUrl::scheme)
      .def_readonly("host", &CanonicalUrl::host)
      .def_readonly("port", &CanonicalUrl::port)
      .def_readonly("path", &CanonicalUrl::path)
      .def_readonly("query", &CanonicalUrl::query)
      .def("serialize", &CanonicalUrl::serialize)
      .def("__str__", &CanonicalUrl::serialize)
      .def("__repr__",
           [](const CanonicalUrl& u) { return "<CanonicalUrl " + u.serialize() + ">"; })
      .def(py::self == py::self);

  m.def(
      "canonicalize", [](const std::string& raw) { return canonicalize(raw); }, py::arg("raw"));
  m.def("to_https", &to_https, py::arg("url"));

  py::enum_<ProbeOutcome>(m, "ProbeOutcome")
      .value("open", ProbeOutcome::kOpen)
      .value("closed", ProbeOutcome::kClosed)
      .value("timeout", ProbeOutcome::kTimeout);

  py::enum_<Verdict>(m, "Verdict")
      .value("https_available", Verdict::kHttpsAvailable)
      .value("http_only", Verdict::kHttpOnly)
      .value("unreachable", Verdict::kUnreachable);

  py::class_<PortProbe>(m, "PortProbe")
      .def(py::init(&make_probe), py::arg("port"), py::arg("outcome"),
           py::arg("latency_ms") = 0)
      .def_readonly("port", &PortProbe::port)
      .def_readonly("outcome", &PortProbe::outcome)
      .def_property_readonly("latency_ms",
                             [](const PortProbe& p) { return p.latency.count(); });

  py::class_<ProbeReport>(m, "ProbeReport")
      .def(py::init([](const PortProbe& p80, const PortProbe& p443) {
             ProbeReport r;
             r.probe80 = p80;
             r.probe443 = p443;
             r.counter = count_open(p80, p443);
             return r;
           }),
           py::arg("probe80"), py::arg("probe443"))
      .def_readonly("host", &ProbeReport::host)
      .def_readonly("resolved_address", &ProbeReport::resolved_address)
      .def_readonly("probe80", &ProbeReport::probe80)
      .def_readonly("probe443", &ProbeReport::probe443)
      .def_readonly("probe21", &ProbeReport::probe21)
      .def_readonly("counter", &ProbeReport::counter);

  m.def("resolve", &resolve, py::arg("host"));
  m.def(
      "probe_port",
      [](const std::string& address, std::uint16_t port, int timeout_ms, bool strict_tls) {
        py::gil_scoped_release release;
        return probe_port(address, port, Millis{timeout_ms}, strict_tls);
      },
      py::arg("address"), py::arg("port"), py::arg("timeout_ms") = 1000,
      py::arg("strict_tls") = false);
  m.def(
      "probe_host",
      [](const CanonicalUrl& url, int timeout_ms, bool strict_tls, const std::string& port_map) {
        ProbeOptions options;
        options.timeout = Millis{timeout_ms};
        options.strict_tls = strict_tls;
        options.port_map = PortMap::parse(port_map);
        py::gil_scoped_release release;
        return probe_host(url, options);
      },
      py::arg("url"), py::arg("timeout_ms") = 1000, py::arg("strict_tls") = false,
      py::arg("port_map") = "");
  m.def("decide", &decide, py::arg("report"));

  py::class_<TamperRecord>(m, "TamperRecord")
      .def(py::init<>())
      .def("add", &TamperRecord::add)
      .def("contains", &TamperRecord::contains)
      .def("should_upgrade", &TamperRecord::should_upgrade)
      .def("entries", &TamperRecord::entries)
      .def("__len__", &TamperRecord::size);

  m.def(
      "rewrite_body",
      [](py::bytes body, const std::string& content_type, TamperRecord& record) {
        return py::bytes(rewrite_body(std::string(body), content_type, record));
      },
      py::arg("body"), py::arg("content_type"), py::arg("record"));
  m.def(
      "rewrite_location",
      [](const std::vector<std::pair<std::string, std::string>>& headers, TamperRecord& record) {
        return to_pairs(rewrite_location(from_pairs(headers), record));
      },
      py::arg("headers"), py::arg("record"));
  m.def(
      "rewrite_set_cookie",
      [](const std::vector<std::pair<std::string, std::string>>& headers) {
        return to_pairs(rewrite_set_cookie(from_pairs(headers)));
      },
      py::arg("headers"));
  m.def("strip_secure_attribute", &strip_secure_attribute, py::arg("set_cookie"));

  py::class_<CaptureEntry>(m, "CaptureEntry")
      .def(py::init([](WallClock::time_point timestamp, bool secure, std::string host,
                       std::string method, py::bytes body) {
             return CaptureEntry{timestamp, secure, std::move(host), std::move(method),
                                 std::string(body)};
           }),
           py::arg("timestamp"), py::arg("secure"), py::arg("host"), py::arg("method") = "POST",
           py::arg("body") = py::bytes())
      .def_readonly("timestamp", &CaptureEntry::timestamp)
      .def_readonly("secure", &CaptureEntry::secure)
      .def_readonly("host", &CaptureEntry::host)
      .def_readonly("method", &CaptureEntry::method)
      .def_property_readonly("body", [](const CaptureEntry& e) { return py::bytes(e.body); });

  m.def(
      "serialize_entry",
      [](const CaptureEntry& e) { return py::bytes(serialize_entry(e)); }, py::arg("entry"));
  m.def(
      "parse_capture_log",
      [](py::bytes contents) { return parse_capture_log(std::string(contents)); },
      py::arg("contents"));
  m.def(
      "scan_for_marker",
      [](const std::filesystem::path& log, py::bytes marker) {
        std::vector<py::dict> out;
        for (const auto& match : scan_for_marker(log, std::string(marker))) {
          py::dict d;
          d["timestamp"] = match.timestamp;
          d["secure"] = match.secure;
          d["host"] = match.host;
          d["method"] = match.method;
          out.push_back(std::move(d));
        }
        return out;
      },
      py::arg("log"), py::arg("marker"));

  m.def(
      "check_response",
      [](const CanonicalUrl& query, const ProbeReport& report) {
        return to_json(make_check_response(query, report, false)).dump();
      },
      py::arg("query"), py::arg("report"),
      "JSON body the /check endpoint would return for this probe report");

  m.def(
      "run_scenario",
      [](const std::string& name) {
        harness::ScenarioReport report;
        {
          py::gil_scoped_release release;
          report = harness::run_scenario(harness::make_scenario(name));
        }
        return report.to_json().dump();
      },
      py::arg("name"), "Runs a testbed scenario and returns its report as JSON text");
}
