#include "rdecusum/report.hpp"

#include <ostream>
#include <string>

#include <fmt/format.h>

#include "rdecusum/series.hpp"

namespace rdecusum {

void write_oc_csv(std::ostream& out, const std::vector<OcRow>& rows) {
  out << "detector,kind,threshold,mu,h,prob,target_far,far,far_ci,mean_time,far_censored,"
         "n_trials,wadd,wadd_ci,delay_at_one,delay_at_one_ci,worst_case_skips,"
         "pdc_direct,pdc_direct_ci,pdc_direct_short,pdc_threshold,pdc_survivors,"
         "pdc_renewal,pdc_renewal_ci\n";
  auto opt = [](bool present, double v) { return present ? format_real(v) : std::string{}; };
  for (const auto& r : rows) {
    const auto& p = r.params;
    const bool has_pdc = r.pdc_direct.has_value();
    const bool has_renewal = r.pdc_renewal.has_value();
    out << fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.detector,
        to_string(p.kind), format_real(p.threshold), format_real(p.mu), format_real(p.h),
        p.kind == DetectorKind::FractionalSampling ? format_real(p.prob) : std::string{},
        opt(r.target_far.has_value(), r.target_far.value_or(0.0)), format_real(r.far.far.value),
        format_real(r.far.far.ci_halfwidth), format_real(r.far.mean_time.value),
        r.far.far.censored_trials, r.far.far.n_trials, format_real(r.wadd.wadd.value),
        format_real(r.wadd.wadd.ci_halfwidth), format_real(r.wadd.delay_at_one.value),
        format_real(r.wadd.delay_at_one.ci_halfwidth), r.wadd.worst_case_skips,
        opt(has_pdc, has_pdc ? r.pdc_direct->pdc.value : 0.0),
        opt(has_pdc, has_pdc ? r.pdc_direct->pdc.ci_halfwidth : 0.0),
        opt(has_pdc, has_pdc ? r.pdc_direct->pdc_short_horizon.value : 0.0),
        opt(has_pdc, has_pdc ? r.pdc_direct->threshold_used : 0.0),
        has_pdc ? std::to_string(r.pdc_direct->survivors) : std::string{},
        opt(has_renewal, has_renewal ? r.pdc_renewal->value : 0.0),
        opt(has_renewal, has_renewal ? r.pdc_renewal->ci_halfwidth : 0.0));
  }
}

}  // namespace rdecusum
