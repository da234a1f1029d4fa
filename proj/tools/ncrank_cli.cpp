#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ncrank/ncrank.hpp"

using namespace ncrank;

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2 };

struct RankArgs {
  std::string pencil;
  std::string witness_out;
  std::string cert_out;
  bool trace = false;
  bool audit = false;
  bool chop = false;
  bool keep_yw = false;
  unsigned jobs = 1;
};

struct VerifyArgs {
  std::string pencil;
  std::string witness;
  std::string cert;
};

struct PitArgs {
  std::string abp;
  bool monomial = false;
  std::size_t witness_dim = 0;
};

Pencil load_pencil(const std::string& path) {
  Pencil T = pencil_from_json(read_json_file(path));
  try {
    T.validate();
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
  return T;
}

int cmd_rank(const RankArgs& a) {
  Pencil T = load_pencil(a.pencil);
  NcrankOptions opt;
  opt.jobs = a.jobs;
  opt.audit = a.audit;
  opt.policy = a.chop ? ReducePolicy::Chop : ReducePolicy::Shrink;
  opt.specialize = !a.keep_yw;
  NcrankResult res = ncrank::ncrank(T, opt);
  if (a.trace) {
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      const auto& t = res.trace[k];
      std::cout << "round " << k + 1 << ": r=" << t.r << " d=" << t.d << " d'=" << t.d_prime << " t0=" << t.t0
                << " ell=" << t.ell << " pair=(" << t.i + 1 << "," << t.j + 1 << ") word=" << t.word_length
                << " -> r=" << t.r_after << " d=" << t.d_after << "\n";
    }
  }
  if (!verify_witness(T, res.witness)) {
    std::cerr << "internal error: computed witness does not verify\n";
    return kFail;
  }
  if (!a.witness_out.empty()) write_text_file(a.witness_out, dump(witness_to_json(T, res.witness)));
  if (!a.cert_out.empty()) write_text_file(a.cert_out, dump(certificate_to_json(T, res.certificate)));
  std::cout << "ncrank = " << res.r << "\n";
  if (a.audit) {
    std::cerr << "audit: " << res.audit.checks << " checks, " << res.audit.failures.size()
              << " failures, max coefficient bits " << res.audit.max_coeff_bits << "\n";
    for (const auto& f : res.audit.failures) std::cerr << "audit failure: " << f << "\n";
    if (!res.audit.ok()) return kFail;
  }
  return kOk;
}

int cmd_verify(const VerifyArgs& a) {
  Pencil T = load_pencil(a.pencil);
  Witness w = witness_from_json(read_json_file(a.witness), T);
  bool ok = verify_witness(T, w);
  if (ok && !a.cert.empty()) {
    UpperCertificate c = certificate_from_json(read_json_file(a.cert));
    ok = verify_upper_certificate(T, w, c);
    if (ok) {
      std::cout << "OK " << w.r << " " << w.dim << " (upper bound certified)\n";
      return kOk;
    }
  }
  if (!ok) {
    std::cout << "FAIL\n";
    return kFail;
  }
  std::cout << "OK " << w.r << " " << w.dim << "\n";
  return kOk;
}

int cmd_pit(const PitArgs& a) {
  json j = read_json_file(a.abp);
  Abp<FieldScalar> f = abp_from_json(j);
  if (rs_zero_test(f)) {
    std::cout << "ZERO\n";
    return kOk;
  }
  std::cout << "NONZERO\n";
  if (!a.monomial && a.witness_dim == 0) return kOk;
  auto [word, coeff] = extract_monomial_with_coeff(f);
  if (a.monomial) std::cout << "monomial: " << word_to_string(word, f.vars) << "  coefficient: " << to_string(coeff) << "\n";
  if (a.witness_dim > 0) {
    if (a.witness_dim < word.size() + 1) {
      std::cerr << "error: --witness-dim must be at least " << word.size() + 1 << "\n";
      return kUsage;
    }
    auto t = automaton_tuple<FieldScalar>(word, f.vars.size(), a.witness_dim);
    json out = json::object();
    for (std::size_t v = 0; v < f.vars.size(); ++v) out[f.vars[v]] = detail::matrix_to_json(t.mats[v]);
    std::cout << "witness: " << out.dump() << "\n";
    const bool nonzero = !abp_eval(f, t).is_zero();
    std::cout << "check: " << (nonzero ? "nonzero" : "vanishes") << "\n";
    if (!nonzero) return kFail;
  }
  return kOk;
}

int cmd_gen(const GenParams& g) {
  Generated out = gen_family(g);
  json meta;
  meta["family"] = g.kind;
  meta["seed"] = g.seed;
  if (out.rank) meta["rank"] = *out.rank;
  if (out.rank_bound) meta["rankBound"] = *out.rank_bound;
  std::cout << dump(pencil_to_json(out.T, meta));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noncommutative rank of linear matrix pencils"};
  app.require_subcommand(1);

  RankArgs ra;
  auto* rank = app.add_subcommand("rank", "compute ncrank with witness and upper-bound certificate");
  rank->add_option("pencil", ra.pencil, "pencil JSON file")->required();
  rank->add_option("--witness-out", ra.witness_out, "write the witness here");
  rank->add_option("--cert-out", ra.cert_out, "write the upper-bound certificate here");
  rank->add_flag("--trace", ra.trace, "print one line per round");
  rank->add_flag("--audit", ra.audit, "check per-round invariants (slower)");
  rank->add_flag("--chop", ra.chop, "reduce witnesses by chopping only");
  rank->add_flag("--keep-yw", ra.keep_yw, "keep witnesses in the division algebra (no y, w specialization)");
  rank->add_option("--jobs", ra.jobs, "parallel PIT tasks")->check(CLI::PositiveNumber);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check a witness (and optionally an upper-bound certificate)");
  verify->add_option("pencil", va.pencil, "pencil JSON file")->required();
  verify->add_option("witness", va.witness, "witness JSON file")->required();
  verify->add_option("--cert", va.cert, "upper-bound certificate JSON file");

  PitArgs pa;
  auto* pit = app.add_subcommand("pit", "zero test of an ABP");
  pit->add_option("abp", pa.abp, "ABP JSON file")->required();
  pit->add_flag("--monomial", pa.monomial, "print a word with nonzero coefficient");
  pit->add_option("--witness-dim", pa.witness_dim, "print the automaton tuple of this dimension and check it");

  GenParams ga;
  auto* gen = app.add_subcommand("gen", "write a pencil from a test family to stdout");
  gen->add_option("kind", ga.kind, "bipartite | skew | factorized | random")
      ->required()
      ->check(CLI::IsMember({"bipartite", "skew", "factorized", "random"}));
  gen->add_option("--n", ga.n, "bipartite side size, or variable count");
  gen->add_option("--edges", ga.edges, "cycle | star | complete | random");
  gen->add_option("--s", ga.s, "matrix size");
  gen->add_option("--r", ga.r, "factorized inner dimension");
  gen->add_option("--lo", ga.lo, "smallest random entry");
  gen->add_option("--hi", ga.hi, "largest random entry");
  gen->add_option("--seed", ga.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*rank) return cmd_rank(ra);
    if (*verify) return cmd_verify(va);
    if (*pit) return cmd_pit(pa);
    if (*gen) return cmd_gen(ga);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
