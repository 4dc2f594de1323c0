#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpc/catalog.hpp"
#include "tpc/errors.hpp"
#include "tpc/numtheory.hpp"
#include "tpc/transcript_log.hpp"

namespace py = pybind11;
using namespace tpc;

namespace {

BigInt to_big(const py::int_& v) { return BigInt(py::str(v).cast<std::string>()); }

py::int_ to_py(const BigInt& v) { return py::int_(py::module_::import("builtins").attr("int")(v.get_str())); }

const catalog::Entry& entry(const std::string& id) {
  const catalog::Entry* e = catalog::find(id);
  if (!e) throw InvalidArgument("unknown protocol '" + id + "'");
  return *e;
}

session::Transport transport(const std::string& name) {
  const auto t = session::parse_transport(name);
  if (!t) throw InvalidArgument("transport must be inproc or loopback");
  return *t;
}

py::dict party_dict(const session::PartyOutcome& p) {
  py::dict d;
  d["finished"] = p.finished;
  d["summary"] = p.summary;
  d["output"] = py::bytes(reinterpret_cast<const char*>(p.private_output.data()), p.private_output.size());
  return d;
}

py::list catalog_list() {
  py::list out;
  for (const auto& e : catalog::entries()) {
    py::dict d, params;
    d["id"] = e.id;
    d["family"] = e.family;
    d["title"] = e.info->title;
    for (const auto& p : e.params) params[py::str(p.name)] = p.default_value;
    d["params"] = params;
    out.append(d);
  }
  return out;
}

py::dict run_session(const std::string& id, const catalog::Options& options, std::uint64_t seed_a,
                     std::uint64_t seed_b, const std::string& via) {
  const auto& e = entry(id);
  const auto out = catalog::run(e, options, seed_a, seed_b, transport(via));
  const auto& r = out.result;
  py::dict d;
  d["protocol"] = e.id;
  d["completed"] = r.ok();
  d["messages"] = r.transcript.size();
  d["a"] = party_dict(r.a);
  d["b"] = party_dict(r.b);
  d["log"] = session::format_log(catalog::make_log(e, out));
  if (r.abort) {
    py::dict a;
    a["kind"] = std::string(session::to_string(r.abort->kind));
    a["detected_by"] = std::string(session::to_string(r.abort->detected_by));
    a["step_index"] = r.abort->step_index;
    a["step_label"] = r.abort->step_label;
    a["reason"] = r.abort->reason;
    d["abort"] = a;
  } else {
    d["abort"] = py::none();
  }
  return d;
}

py::dict run_stats(const std::string& id, const catalog::Options& options, std::size_t trials,
                   std::uint64_t first_seed, const std::string& via) {
  const auto report = [&] {
    py::gil_scoped_release release;
    return catalog::run_stats(entry(id), options, trials, first_seed, transport(via));
  }();
  py::dict d, rates, means;
  d["protocol"] = report.protocol;
  d["trials"] = report.trials;
  for (const auto& r : report.rates) {
    py::dict x;
    x["rate"] = r.rate;
    x["successes"] = r.successes;
    x["trials"] = r.trials;
    x["ci95"] = py::make_tuple(r.ci_low, r.ci_high);
    rates[py::str(r.name)] = x;
  }
  for (const auto& m : report.means) means[py::str(m.name)] = m.mean;
  d["rates"] = rates;
  d["means"] = means;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-party protocol sessions backed by the C++ library.";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<FramingError>(m, "FramingError", base.ptr());
  py::register_exception<VerificationError>(m, "VerificationError", base.ptr());

  m.def("catalog", &catalog_list, "Every protocol with its parameter defaults.");
  m.def("run", &run_session, py::arg("protocol"), py::arg("options") = catalog::Options{}, py::arg("seed_a") = 1,
        py::arg("seed_b") = 2, py::arg("transport") = "inproc",
        "Run one seeded session; returns outputs, abort details and the transcript log text.");
  m.def("stats", &run_stats, py::arg("protocol"), py::arg("options") = catalog::Options{}, py::arg("trials") = 1000,
        py::arg("first_seed") = 0, py::arg("transport") = "inproc", "Rates with 95% intervals over many sessions.");
  m.def(
      "verify_transcript",
      [](const std::string& text) {
        const auto log = session::parse_log(text);
        catalog::verify_log(log);
        return log.session_id;
      },
      py::arg("log"), "Replay every check of a transcript log; returns the session id or raises.");

  m.def(
      "jacobi", [](const py::int_& a, const py::int_& n) { return numtheory::jacobi(to_big(a), to_big(n)); },
      py::arg("a"), py::arg("n"));
  m.def(
      "four_square_roots",
      [](const py::int_& y, const py::int_& p, const py::int_& q) {
        const auto roots = numtheory::four_square_roots(to_big(y), numtheory::BlumModulus(to_big(p), to_big(q)));
        py::list out;
        for (const auto& r : roots) out.append(to_py(r));
        return out;
      },
      py::arg("y"), py::arg("p"), py::arg("q"), "Ascending square roots of y modulo the Blum integer p*q.");
  m.def(
      "factor_from_roots",
      [](const py::int_& x, const py::int_& y, const py::int_& n) {
        const auto f = numtheory::factor_from_roots(to_big(x), to_big(y), to_big(n));
        return py::make_tuple(to_py(f.first), to_py(f.second));
      },
      py::arg("x"), py::arg("y"), py::arg("n"));
}
