#pragma once

#include "purcell/admittance.hpp"
#include "purcell/eigenmode.hpp"
#include "purcell/purcell_model.hpp"
#include "purcell/spectro_fit.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace purcell::io {

/// Minimal comma-separated table: header plus rows of raw cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws ParseError when absent.
    [[nodiscard]] std::size_t column(std::string_view name) const;
};

[[nodiscard]] CsvTable parse_csv(std::string_view text);

/// %.12g, "nan"/"inf" for non-finite values.
[[nodiscard]] std::string fmt(double v);

/// freq_hz,value,normalized
void write_q_curve(std::ostream& out, const QCurve& curve);
[[nodiscard]] QCurve read_q_curve(std::string_view text);

/// inductance_h,freq_hz,q,sigma_per_s,identity,participation,jump,gap
void write_sweep_trace(std::ostream& out, const SweepTrace& trace, const BranchMap& map);

void write_fits(std::ostream& out, const std::vector<ResonatorFit>& fits);
[[nodiscard]] std::vector<ResonatorFit> read_fits(std::string_view text);

void write_overlay(std::ostream& out, const OverlayTable& table);

/// qubit_id,t1_s,t2_ramsey_s,t2_echo_s; optional columns may be blank.
[[nodiscard]] std::vector<CoherenceSample> read_coherence(std::string_view text);
void write_coherence(std::ostream& out, const std::vector<CoherenceSample>& samples);

/// freq_hz,re,im
[[nodiscard]] ReflectionTrace read_trace_csv(std::string_view text, std::string source = {});

}  // namespace purcell::io
