#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "reyeweb/cover.hpp"
#include "reyeweb/reye.hpp"
#include "reyeweb/schubert.hpp"
#include "reyeweb/web.hpp"

namespace reyeweb {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "reyeweb";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "reyeweb-report-v1";

// ---- value serialization ---------------------------------------------------------

Json cd_to_json(const CD& z);
CD cd_from_json(const Json& j);
Json vec4_to_json(const Vec4<CD>& v);
Json line_to_json(const PLineC& l);

// ---- web persistence -------------------------------------------------------------

/// {"seed": u64, "coeff_range": int, "basis": [[10 "p/q" strings] x4]} with the
/// ten entries in upper-triangular order (0,0),(0,1),(0,2),(0,3),(1,1),(1,2),
/// (1,3),(2,2),(2,3),(3,3). Round-trips exactly.
Json web_to_json(const Web& web);
Web web_from_json(const Json& j);

void save_web(const Web& web, const std::string& path);
Web load_web(const std::string& path);

// ---- experiments -----------------------------------------------------------------

/// One experiment record: a JSON fragment plus its verdict.
struct Experiment {
  std::string name;
  Json record;
  bool pass = false;
};

Experiment exp_genericity(const Web& web, double tol);
Experiment exp_nodes(const Web& web, double tol);
Experiment exp_reye_count(const Web& web, double tol);
Experiment exp_sample(const Web& web, double tol, int samples);
Experiment exp_bitangent(const Web& web, double tol, int samples);
Experiment exp_monodromy(const Web& web, double tol);
Experiment exp_fano_degree(const Web& web, double tol);
Experiment exp_chow(const Web& web, double tol);

/// Assemble the report envelope around a set of experiment records. The
/// "meta" object (timestamp, runtimes) is the only non-reproducible part;
/// strip it before byte comparisons.
Json make_report(const Web& web, const std::vector<Experiment>& experiments,
                 const std::vector<std::pair<std::string, double>>& runtimes_ms);

/// Report with the "meta" member removed, for reproducibility comparisons.
Json strip_meta(Json report);

}  // namespace reyeweb
