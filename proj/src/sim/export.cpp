#include "eqf/sim/export.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace eqf::sim {

namespace {

std::string formatNumber(double x, int precision = 17) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, precision);
    return std::string(buf.data(), res.ptr);
}

double parseDouble(std::string_view s, std::size_t lineNo) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("csv line " + std::to_string(lineNo) + ": bad number '" + std::string(s) + "'");
    }
    return x;
}

std::vector<std::string_view> splitFields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string escapeXml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

bool CsvRow::operator==(const CsvRow& o) const {
    return run == o.run && t == o.t && filter == o.filter && estimate.p == o.estimate.p && estimate.v == o.estimate.v &&
           positionError == o.positionError && velocityError == o.velocityError && energy == o.energy;
}

std::vector<CsvRow> csvRows(const std::vector<RunRecord>& records) {
    std::vector<CsvRow> rows;
    for (const RunRecord& r : records) {
        for (const FilterTrack& track : r.filters) {
            for (std::size_t k = 0; k < track.samples.size(); ++k) {
                const FilterSample& s = track.samples[k];
                rows.push_back({r.run, r.times[k], track.kind, s.estimate, s.positionError, s.velocityError, s.energy});
            }
        }
    }
    return rows;
}

void writeCsv(std::ostream& out, const std::vector<RunRecord>& records) {
    std::string line;
    out << kCsvHeader << '\n';
    for (const CsvRow& row : csvRows(records)) {
        line.clear();
        line += std::to_string(row.run);
        line += ',';
        line += formatNumber(row.t);
        line += ',';
        line += filterName(row.filter);
        for (int i = 0; i < 3; ++i) (line += ',') += formatNumber(row.estimate.p(i));
        for (int i = 0; i < 3; ++i) (line += ',') += formatNumber(row.estimate.v(i));
        (line += ',') += formatNumber(row.positionError);
        (line += ',') += formatNumber(row.velocityError);
        (line += ',') += formatNumber(row.energy);
        line += '\n';
        out << line;
    }
}

void writeCsvFile(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    writeCsv(out, records);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<CsvRow> parseCsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("csv: missing or unexpected header");
    std::vector<CsvRow> rows;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        const auto f = splitFields(line);
        if (f.size() != 12) throw std::invalid_argument("csv line " + std::to_string(lineNo) + ": expected 12 fields");
        CsvRow row;
        int run = 0;
        const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), run);
        if (ec != std::errc() || ptr != f[0].data() + f[0].size()) {
            throw std::invalid_argument("csv line " + std::to_string(lineNo) + ": bad run index");
        }
        row.run = run;
        row.t = parseDouble(f[1], lineNo);
        row.filter = parseFilterName(f[2]);
        for (int i = 0; i < 3; ++i) row.estimate.p(i) = parseDouble(f[3 + i], lineNo);
        for (int i = 0; i < 3; ++i) row.estimate.v(i) = parseDouble(f[6 + i], lineNo);
        row.positionError = parseDouble(f[9], lineNo);
        row.velocityError = parseDouble(f[10], lineNo);
        row.energy = parseDouble(f[11], lineNo);
        rows.push_back(row);
    }
    return rows;
}

void writeSummaryCsv(std::ostream& out, const MonteCarloResult& result) {
    out << "t,filter,mean_pos_err,median_pos_err,mean_vel_err,median_vel_err,mean_energy,runs\n";
    for (const FilterAggregate& f : result.filters) {
        for (std::size_t k = 0; k < result.times.size(); ++k) {
            out << formatNumber(result.times[k]) << ',' << filterName(f.kind) << ',' << formatNumber(f.meanPositionError[k])
                << ',' << formatNumber(f.medianPositionError[k]) << ',' << formatNumber(f.meanVelocityError[k]) << ','
                << formatNumber(f.medianVelocityError[k]) << ',' << formatNumber(f.meanEnergy[k]) << ',' << f.count[k]
                << '\n';
        }
    }
}

void writeSvg(std::ostream& out, const std::vector<Panel>& panels) {
    constexpr double width = 720.0, panelHeight = 240.0;
    constexpr double left = 70.0, right = 150.0, top = 30.0, bottom = 40.0;
    const double plotW = width - left - right;
    const double plotH = panelHeight - top - bottom;
    const double height = panelHeight * std::max<std::size_t>(panels.size(), 1);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Panel& panel = panels[pi];
        const double y0 = pi * panelHeight + top;
        auto transformY = [&](double v) { return panel.logScale ? std::log10(v) : v; };
        auto usable = [&](double v) { return std::isfinite(v) && (!panel.logScale || v > 0.0); };

        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const Series& s : panel.series) {
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
                if (!usable(s.y[k]) || !std::isfinite(s.x[k])) continue;
                xmin = std::min(xmin, s.x[k]);
                xmax = std::max(xmax, s.x[k]);
                ymin = std::min(ymin, transformY(s.y[k]));
                ymax = std::max(ymax, transformY(s.y[k]));
            }
        }
        if (usable(panel.referenceLine)) {
            ymin = std::min(ymin, transformY(panel.referenceLine));
            ymax = std::max(ymax, transformY(panel.referenceLine));
        }
        if (!(xmin < xmax)) xmin = 0.0, xmax = 1.0;
        if (!(ymin < ymax)) {
            const double c = std::isfinite(ymin) ? ymin : 0.0;
            ymin = c - 1.0;
            ymax = c + 1.0;
        }
        auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plotW; };
        auto py = [&](double y) { return y0 + plotH - (transformY(y) - ymin) / (ymax - ymin) * plotH; };

        out << "<g>\n<text x=\"" << left << "\" y=\"" << y0 - 10 << "\" font-size=\"13\">" << escapeXml(panel.title)
            << "</text>\n";
        out << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << plotW << "\" height=\"" << plotH
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        // Axis ticks: 5 on x, ends plus middle on y.
        for (int i = 0; i <= 4; ++i) {
            const double x = xmin + (xmax - xmin) * i / 4.0;
            out << "<text x=\"" << px(x) << "\" y=\"" << y0 + plotH + 15 << "\" text-anchor=\"middle\">"
                << formatNumber(x, 3) << "</text>\n";
        }
        for (int i = 0; i <= 2; ++i) {
            const double ty = ymin + (ymax - ymin) * i / 2.0;
            const double value = panel.logScale ? std::pow(10.0, ty) : ty;
            const double yy = y0 + plotH - (ty - ymin) / (ymax - ymin) * plotH;
            out << "<text x=\"" << left - 5 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\">" << formatNumber(value, 3)
                << "</text>\n";
        }
        out << "<text x=\"" << left + plotW / 2 << "\" y=\"" << y0 + plotH + 32 << "\" text-anchor=\"middle\">t [s]</text>\n";
        out << "<text transform=\"translate(" << 15 << ',' << y0 + plotH / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
            << escapeXml(panel.yLabel) << "</text>\n";
        if (usable(panel.referenceLine)) {
            out << "<line x1=\"" << left << "\" x2=\"" << left + plotW << "\" y1=\"" << py(panel.referenceLine)
                << "\" y2=\"" << py(panel.referenceLine) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
        }
        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const Series& s = panel.series[si];
            const char* colour = kPalette[si % kPalette.size()];
            out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
                if (!usable(s.y[k]) || !std::isfinite(s.x[k])) continue;
                out << formatNumber(px(s.x[k]), 6) << ',' << formatNumber(py(s.y[k]), 6) << ' ';
            }
            out << "\"/>\n";
            const double ly = y0 + 12 + 16 * si;
            out << "<line x1=\"" << left + plotW + 10 << "\" x2=\"" << left + plotW + 30 << "\" y1=\"" << ly - 4
                << "\" y2=\"" << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << left + plotW + 35 << "\" y=\"" << ly << "\">" << escapeXml(s.label) << "</text>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
}

void writeSvgFile(const std::string& path, const std::vector<Panel>& panels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    writeSvg(out, panels);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<Panel> runPanels(const RunRecord& record) {
    Panel pos{"Position error", "|p - p_hat| [m]", {}, true};
    Panel vel{"Velocity error", "|v - v_hat| [m/s]", {}, true};
    Panel energy{"Filter energy", "energy", {}, true, 1.0};
    for (const FilterTrack& track : record.filters) {
        Series p{std::string(filterName(track.kind)), {}, {}}, v = p, e = p;
        for (std::size_t k = 0; k < track.samples.size(); ++k) {
            const double t = record.times[k];
            p.x.push_back(t), v.x.push_back(t), e.x.push_back(t);
            p.y.push_back(track.samples[k].positionError);
            v.y.push_back(track.samples[k].velocityError);
            e.y.push_back(track.samples[k].energy);
        }
        pos.series.push_back(std::move(p));
        vel.series.push_back(std::move(v));
        energy.series.push_back(std::move(e));
    }
    return {pos, vel, energy};
}

std::vector<Panel> comparePanels(const MonteCarloResult& result) {
    Panel pos{"Mean position error", "[m]", {}, true};
    Panel vel{"Mean velocity error", "[m/s]", {}, true};
    Panel energy{"Mean filter energy", "energy", {}, true, 1.0};
    for (const FilterAggregate& f : result.filters) {
        const std::string label(filterName(f.kind));
        pos.series.push_back({label, result.times, f.meanPositionError});
        vel.series.push_back({label, result.times, f.meanVelocityError});
        energy.series.push_back({label, result.times, f.meanEnergy});
    }
    return {pos, vel, energy};
}

}  // namespace eqf::sim
