#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rauzylab/cli.hpp"
#include "rauzylab/errors.hpp"
#include "rauzylab/dynamics.hpp"
#include "rauzylab/quasirandom.hpp"
#include "rauzylab/rvgroup.hpp"
#include "rauzylab/transfer.hpp"

namespace py = pybind11;
using namespace rauzylab;

namespace {

py::object big_to_py(const BigInt& v) {
  // route through the decimal string so arbitrary precision survives
  return py::module_::import("builtins").attr("int")(v.str());
}

py::list matrix_to_py(const BigMatrix& m) {
  py::list rows;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    py::list row;
    for (std::size_t j = 0; j < m.cols(); ++j) row.append(big_to_py(m.at(i, j)));
    rows.append(row);
  }
  return rows;
}

PathSelection selection_for(const PermutationPair& pair,
                            const std::string& gamma0_spec) {
  RauzyClass cls = rauzy_class(pair);
  if (gamma0_spec == "auto") return build_gamma0(cls, pair, {});
  if (gamma0_spec == "tree")
    return build_gamma0(cls, pair, spanning_tree_loops(cls, pair));
  PathSelection sel;
  sel.gamma0 = parse_path(gamma0_spec);
  return sel;
}

std::vector<SpElement> loop_generators(const PermutationPair& pair) {
  RauzyClass cls = rauzy_class(pair);
  SymplecticBasis basis = symplectic_basis(pair);
  std::vector<SpElement> gens;
  for (auto& loop : spanning_tree_loops(cls, pair))
    gens.push_back(induced_sp(loop, basis));
  return gens;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rauzy-Veech induction, congruence-group expansion and transfer "
            "operator toolkit";

  static py::exception<rauzylab::Error> error_type(m, "RauzylabError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const rauzylab::Error& e) {
      error_type(e.what());
    }
  });

  py::class_<PermutationPair>(m, "PermutationPair")
      .def(py::init([](const std::string& text) { return parse_pair(text); }),
           py::arg("text"))
      .def_property_readonly("d", &PermutationPair::size)
      .def("text", &PermutationPair::to_text)
      .def("short_text", &PermutationPair::short_text)
      .def("__eq__", [](const PermutationPair& a,
                        const PermutationPair& b) { return a == b; })
      .def("__repr__", [](const PermutationPair& p) {
        return "PermutationPair('" + p.short_text() + "')";
      });

  py::class_<RauzyPath>(m, "RauzyPath")
      .def(py::init([](const std::string& text) { return parse_path(text); }),
           py::arg("text"))
      .def_property_readonly("length", &RauzyPath::length)
      .def("text", &RauzyPath::to_text)
      .def("__repr__", [](const RauzyPath& p) {
        return "RauzyPath('" + p.to_text() + "')";
      });

  m.def("make_pair", &make_pair, py::arg("top"), py::arg("bottom"));
  m.def("parse_pair", &parse_pair, py::arg("text"));
  m.def("is_irreducible", &is_irreducible);

  m.def("rauzy_class_summary", [](const PermutationPair& pair) {
    RauzyClass cls = rauzy_class(pair);
    return py::make_tuple(cls.vertices.size(), cls.arrows.size());
  });
  m.def("class_edges", [](const PermutationPair& pair) {
    return rauzy_class(pair).export_edges();
  });

  m.def("theta_of_path",
        [](const RauzyPath& path) { return matrix_to_py(theta_of_path(path)); });
  m.def("omega",
        [](const PermutationPair& pair) { return matrix_to_py(omega(pair)); });
  m.def("intertwining_holds_everywhere", [](const PermutationPair& pair) {
    RauzyClass cls = rauzy_class(pair);
    for (const auto& arrow : cls.arrows)
      if (!check_intertwining(arrow)) return false;
    return true;
  });
  m.def("genus", [](const PermutationPair& pair) {
    return symplectic_basis(pair).genus;
  });

  m.def(
      "build_gamma0",
      [](const PermutationPair& pair, const std::string& upsilon) {
        RauzyClass cls = rauzy_class(pair);
        std::vector<RauzyPath> upsilon0;
        if (upsilon == "tree") upsilon0 = spanning_tree_loops(cls, pair);
        PathSelection sel = build_gamma0(cls, pair, upsilon0);
        bool avoided = true;
        for (const auto& g : sel.upsilon)
          if (!contains_subpath(g, sel.gamma0).empty()) avoided = false;
        py::dict out;
        out["gamma0"] = sel.gamma0.to_text();
        out["length"] = sel.gamma0.length();
        out["strongly_positive"] = is_strongly_positive(sel.gamma0);
        out["neat"] = is_neat(sel.gamma0);
        out["avoided"] = avoided;
        return out;
      },
      py::arg("pair"), py::arg("upsilon") = "none");

  m.def("sp_order", [](std::size_t genus, long long q) {
    return big_to_py(sp_order(genus, q));
  });

  m.def(
      "mod_q_closure",
      [](const PermutationPair& pair, long long q, std::uint64_t cap) {
        SymplecticBasis basis = symplectic_basis(pair);
        auto [size, surjective] =
            mod_q_closure(loop_generators(pair), basis.genus, q, cap);
        return py::make_tuple(big_to_py(size), surjective);
      },
      py::arg("pair"), py::arg("q"), py::arg("cap") = 1 << 20);

  m.def(
      "cayley_gap",
      [](const PermutationPair& pair, long long q, std::uint64_t seed) {
        SymplecticBasis basis = symplectic_basis(pair);
        return cayley_gap(loop_generators(pair), basis.genus, q, seed)
            .lambda1;
      },
      py::arg("pair"), py::arg("q"), py::arg("seed") = 17);

  m.def(
      "sample_roofs",
      [](const PermutationPair& pair, const std::string& gamma0,
         std::size_t n, std::uint64_t seed) {
        FlowSystem sys = make_flow_system(selection_for(pair, gamma0));
        std::vector<double> roofs;
        roofs.reserve(n);
        orbit_run(seed, n, sys,
                  [&](const ReturnRecord& r) { roofs.push_back(r.roof); });
        return roofs;
      },
      py::arg("pair"), py::arg("gamma0") = "auto", py::arg("n") = 1000,
      py::arg("seed") = 1);

  m.def("roof_tail_stats", [](std::vector<double> roofs) {
    TailFit fit = roof_tail_stats(std::move(roofs));
    py::dict out;
    out["slope"] = fit.slope;
    out["r2"] = fit.r2;
    out["min_roof"] = fit.min_roof;
    out["n"] = fit.n;
    return out;
  });

  m.def(
      "cocycle_distribution",
      [](const PermutationPair& pair, const std::string& gamma0, long long q,
         std::size_t n, std::uint64_t seed) {
        FlowSystem sys = make_flow_system(selection_for(pair, gamma0));
        CocycleHistogram hist = cocycle_distribution(seed, n, sys, q);
        py::dict out;
        out["chi2"] = hist.chi2;
        out["dof"] = hist.dof;
        out["p_value"] = hist.p_value;
        out["counts"] = hist.counts;
        return out;
      },
      py::arg("pair"), py::arg("gamma0") = "auto", py::arg("q") = 3,
      py::arg("n") = 10000, py::arg("seed") = 1);

  m.def("hilbert_distance", &hilbert_distance);

  m.def(
      "rpf",
      [](const PermutationPair& pair, const std::string& gamma0,
         std::size_t grid, double cutoff, double sigma) {
        TransferConfig cfg =
            make_transfer_config(selection_for(pair, gamma0), grid, cutoff,
                                 sigma);
        RPFData data = rpf_leading(cfg, sigma);
        py::dict out;
        out["lambda"] = data.lambda_sigma;
        out["residual"] = data.residual;
        out["tail_bound"] = cfg.tail_bound;
        out["branches"] = cfg.branches.size();
        out["markoff_defect"] = markoff_defect(cfg, data, sigma);
        return out;
      },
      py::arg("pair"), py::arg("gamma0") = "auto", py::arg("grid") = 32,
      py::arg("cutoff") = 1000.0, py::arg("sigma") = 0.0);

  m.def(
      "twisted_decay",
      [](const PermutationPair& pair, const std::string& gamma0, long long q,
         std::size_t grid, double cutoff, std::size_t kmax,
         const std::string& subspace, std::uint64_t seed) {
        PathSelection sel = selection_for(pair, gamma0);
        TransferConfig cfg = make_transfer_config(sel, grid, cutoff, 0.0);
        RPFData rpf = rpf_leading(cfg, 0.0);
        FlowSystem sys = make_flow_system(sel);
        FiniteGroup group = fiber_group(sys, q);
        FiberSubspace sub = subspace == "full"
                                ? FiberSubspace::Full
                                : (subspace == "new" ? FiberSubspace::New
                                                     : FiberSubspace::MeanZero);
        DecayReport rep = twisted_radius(cfg, rpf, group, kmax, sub, seed);
        py::dict out;
        out["rate"] = rep.rate;
        out["norms"] = rep.norms;
        out["tail_bound"] = rep.tail_bound;
        return out;
      },
      py::arg("pair"), py::arg("gamma0") = "auto", py::arg("q") = 3,
      py::arg("grid") = 32, py::arg("cutoff") = 500.0, py::arg("kmax") = 12,
      py::arg("subspace") = "mean_zero", py::arg("seed") = 9);

  m.def("dixon_dims", [](long long q, std::size_t genus) {
    return dixon_dims(q, genus);
  });
  m.def("min_new_dim", [](long long q, std::size_t genus) {
    return min_new_dim(q, genus);
  });
  m.def("min_dim_bound", [](long long q, std::size_t genus) {
    DimBound b = min_dim_bound(q, genus);
    std::ostringstream num, den;
    num << numerator(b.bound);
    den << denominator(b.bound);
    auto pyint = py::module_::import("builtins").attr("int");
    auto frac =
        py::module_::import("fractions").attr("Fraction")(pyint(num.str()),
                                                          pyint(den.str()));
    return frac;
  });

  m.def(
      "adjoint_orbit_size",
      [](long long p, int r, std::size_t genus, const std::string& matrix) {
        LieAlgebraElement x =
            make_lie_element(p, r, genus, BigMatrix::from_text(matrix));
        return big_to_py(adjoint_orbit_size(x));
      },
      py::arg("p"), py::arg("r") = 1, py::arg("genus") = 1,
      py::arg("matrix") = "0,1;0,0");

  m.def(
      "decoupling_check",
      [](const PermutationPair& pair, std::size_t L, std::size_t K,
         long long q, std::size_t grid, double cutoff, std::uint64_t seed) {
        PathSelection sel = selection_for(pair, "auto");
        TransferConfig cfg = make_transfer_config(sel, grid, cutoff, 0.0);
        RPFData rpf = rpf_leading(cfg, 0.0);
        FiniteGroup group = sp_group(cfg.basis.genus, q);
        DecouplingReport rep = decoupling_check(cfg, rpf, group, L, K, seed);
        py::dict out;
        out["dominated"] = rep.dominated;
        out["c_deviation"] = rep.c_deviation;
        out["measured_b"] = rep.measured_b;
        out["conv_rate"] = rep.conv_rate;
        out["block_rate"] = rep.block_rate;
        out["tuples"] = rep.tuple_count;
        return out;
      },
      py::arg("pair"), py::arg("L") = 2, py::arg("K") = 2, py::arg("q") = 3,
      py::arg("grid") = 32, py::arg("cutoff") = 10.0, py::arg("seed") = 21);

  m.def(
      "run_command",
      [](const std::vector<std::string>& args) { return run_command(args); },
      py::arg("args"), "invoke the CLI entry point in-process");

  m.attr("__version__") = "0.1.0";
}
