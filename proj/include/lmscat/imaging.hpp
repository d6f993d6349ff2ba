#ifndef LMSCAT_IMAGING_HPP
#define LMSCAT_IMAGING_HPP
//
// lmscat/imaging: the discrete direct-imaging functional on pair-grid
// phaseless data, rectangular grid sweeps, and peak extraction.
//

#include <string>
#include <vector>

#include "lmscat/synth.hpp"

namespace lmscat {

struct ImagingGrid {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    int nx = 0, ny = 0;
    Eigen::MatrixXd values;  // (ny x nx), row iy, col ix

    double node_x(int ix) const { return nx > 1 ? x0 + (x1 - x0) * ix / (nx - 1) : x0; }
    double node_y(int iy) const { return ny > 1 ? y0 + (y1 - y0) * iy / (ny - 1) : y0; }
};

// the three-term indicator at a sampling point; asserts the imaginary residue
// of the assembled sum is below 1e-10 of its magnitude before dropping it
double imaging_value(Vec2 z, const PhaselessDataset& ds, int freq_index = 0);

ImagingGrid imaging_grid(const PhaselessDataset& ds, double x0, double x1, double y0, double y1,
                         int nx, int ny, int freq_index = 0);

struct Peak {
    Vec2 location;
    double value = 0.0;
};

struct PeakSet {
    std::vector<Peak> peaks;  // sorted by value, descending
    bool degenerate = false;  // all-equal grid
};

PeakSet find_peaks(const ImagingGrid& grid, double threshold_frac = 0.5,
                   double suppression_radius = 0.0);

void write_grid_csv(const ImagingGrid& grid, const std::string& path,
                    const std::string& config_hash = "");
// 8-bit binary PGM with linear min-max scaling; the scale goes to a sidecar
// json next to the image
void write_grid_pgm(const ImagingGrid& grid, const std::string& path_prefix,
                    const std::string& config_hash = "");
void write_peaks_json(const PeakSet& peaks, const std::string& path,
                      const std::string& config_hash = "");
PeakSet read_peaks_json(const std::string& path);

}  // namespace lmscat

#endif  // LMSCAT_IMAGING_HPP
