#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>

#include "bmprior/analysis.hpp"
#include "bmprior/gibbs.hpp"
#include "bmprior/ising_model.hpp"
#include "bmprior/patchset.hpp"
#include "bmprior/priormodel.hpp"

namespace bmprior::report {

inline constexpr const char* kToolVersion = "1.0.0";
// Bumped whenever a field of a JSON document changes meaning.
inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

json model_to_json(const IsingModel& model);
IsingModel model_from_json(const json& j);

json moments_to_json(const EmpiricalMoments& m);
EmpiricalMoments moments_from_json(const json& j);

// Flat object: the six parameters plus h0 and r_cut.
json prior_to_json(const PriorParams& p, double h0, double r_cut);
struct PriorFile {
    PriorParams params;
    double h0 = 0.0;
    double r_cut = kDefaultTailCutoff;
};
PriorFile prior_from_json(const json& j);

json histogram_to_json(const Histogram& h);
json profile_to_json(const DistanceProfile& p);
json fit_to_json(const ExpFit& f);

json read_json_file(const std::string& path);
// Writes to `path`, or to `console` when path is empty or "-".
void write_text(const std::string& path, const std::string& text, std::ostream& console);

}  // namespace bmprior::report
