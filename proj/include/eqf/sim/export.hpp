#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "eqf/sim/simulation.hpp"

namespace eqf::sim {

/// Exact CSV header, no trailing newline.
inline constexpr const char* kCsvHeader = "run,t,filter,px,py,pz,vx,vy,vz,pos_err,vel_err,energy";

/// One CSV row: a filter sample of one run.
struct CsvRow {
    int run = 0;
    double t = 0.0;
    FilterKind filter = FilterKind::Eqf;
    KinematicState estimate;
    double positionError = 0.0;
    double velocityError = 0.0;
    double energy = 0.0;

    bool operator==(const CsvRow& o) const;
};

/// Rows in output order: runs as given, then filters, then samples.
std::vector<CsvRow> csvRows(const std::vector<RunRecord>& records);

/// Writes header and rows with LF line endings and 17 significant digits.
void writeCsv(std::ostream& out, const std::vector<RunRecord>& records);
/// Throws std::runtime_error when the file cannot be written.
void writeCsvFile(const std::string& path, const std::vector<RunRecord>& records);

/// Parses CSV produced by writeCsv. Throws std::invalid_argument on a bad
/// header or malformed row.
std::vector<CsvRow> parseCsv(std::istream& in);

/// Mean curves of a Monte-Carlo batch: t, filter, mean/median errors, energy.
void writeSummaryCsv(std::ostream& out, const MonteCarloResult& result);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::string yLabel;
    std::vector<Series> series;
    bool logScale = false;
    double referenceLine = std::numeric_limits<double>::quiet_NaN();  ///< dashed horizontal line
};

/// Stacked line charts, one per panel, sharing the x axis label "t [s]".
void writeSvg(std::ostream& out, const std::vector<Panel>& panels);
void writeSvgFile(const std::string& path, const std::vector<Panel>& panels);

/// Position error, velocity error and energy of every filter in one run.
std::vector<Panel> runPanels(const RunRecord& record);
/// Mean position error, mean velocity error and mean energy per filter.
std::vector<Panel> comparePanels(const MonteCarloResult& result);

}  // namespace eqf::sim
