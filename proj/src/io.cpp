#include "esrom/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "esrom/errors.hpp"

namespace esrom {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

const auto& fmt = format_double;


constexpr char kSnapshotMagic[4] = {'E', 'S', 'R', 'M'};
constexpr char kManifoldMagic[4] = {'E', 'S', 'M', 'F'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is, const std::string& path) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw IoError("truncated file: " + path);
    return v;
}

void write_f64_block(std::ostream& os, const double* data, std::size_t count) {
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(double)));
}

void read_f64_block(std::istream& is, double* data, std::size_t count,
                    const std::string& path) {
    if (!is.read(reinterpret_cast<char*>(data),
                 static_cast<std::streamsize>(count * sizeof(double))))
        throw IoError("truncated file: " + path);
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    write_f64_block(os, m.data(), static_cast<std::size_t>(m.size()));
}

Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols,
                            const std::string& path) {
    Eigen::MatrixXd m(rows, cols);
    read_f64_block(is, m.data(), static_cast<std::size_t>(m.size()), path);
    return m;
}

Eigen::Index packed_count(int r) { return static_cast<Eigen::Index>(r) * (r + 1) / 2; }

// Symmetric slices packed row-wise (p <= q); lower-triangular likewise (p >= q).
Eigen::MatrixXd pack_sym(const std::vector<Eigen::MatrixXd>& slices, int r) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(slices.size()), packed_count(r));
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        Eigen::Index idx = 0;
        for (int p = 0; p < r; ++p)
            for (int q = p; q < r; ++q) out(i, idx++) = slices[i](p, q);
    }
    return out;
}

std::vector<Eigen::MatrixXd> unpack_sym(const Eigen::MatrixXd& packed, int r) {
    std::vector<Eigen::MatrixXd> slices(packed.rows());
    for (Eigen::Index i = 0; i < packed.rows(); ++i) {
        Eigen::MatrixXd m(r, r);
        Eigen::Index idx = 0;
        for (int p = 0; p < r; ++p)
            for (int q = p; q < r; ++q) {
                m(p, q) = packed(i, idx);
                m(q, p) = packed(i, idx);
                ++idx;
            }
        slices[i] = std::move(m);
    }
    return slices;
}

Eigen::MatrixXd pack_lower(const std::vector<Eigen::MatrixXd>& slices, int r) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(slices.size()), packed_count(r));
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        Eigen::Index idx = 0;
        for (int p = 0; p < r; ++p)
            for (int q = 0; q <= p; ++q) out(i, idx++) = slices[i](p, q);
    }
    return out;
}

std::vector<Eigen::MatrixXd> unpack_lower(const Eigen::MatrixXd& packed, int r) {
    std::vector<Eigen::MatrixXd> slices(packed.rows());
    for (Eigen::Index i = 0; i < packed.rows(); ++i) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(r, r);
        Eigen::Index idx = 0;
        for (int p = 0; p < r; ++p)
            for (int q = 0; q <= p; ++q) m(p, q) = packed(i, idx++);
        slices[i] = std::move(m);
    }
    return slices;
}

} // namespace

void write_snapshots(const SnapshotSet& snaps, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open snapshot file for writing: " + path);
    os.write(kSnapshotMagic, 4);
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(snaps.n_vars));
    write_u32(os, static_cast<std::uint32_t>(snaps.n_cells));
    write_u32(os, static_cast<std::uint32_t>(snaps.n_snapshots()));
    const double ab[2] = {snaps.domain_a, snaps.domain_b};
    write_f64_block(os, ab, 2);
    write_matrix(os, snaps.data);
    write_f64_block(os, snaps.times.data(),
                    static_cast<std::size_t>(snaps.times.size()));
    if (!os) throw IoError("failed writing snapshot file: " + path);
}

SnapshotSet read_snapshots(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open snapshot file: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kSnapshotMagic, 4) != 0)
        throw IoError("not a snapshot file (bad magic): " + path);
    if (read_u32(is, path) != kVersion)
        throw IoError("unsupported snapshot file version: " + path);
    SnapshotSet snaps;
    snaps.n_vars = static_cast<int>(read_u32(is, path));
    snaps.n_cells = static_cast<int>(read_u32(is, path));
    const int n_s = static_cast<int>(read_u32(is, path));
    double ab[2];
    read_f64_block(is, ab, 2, path);
    snaps.domain_a = ab[0];
    snaps.domain_b = ab[1];
    const Eigen::Index n_dof =
        static_cast<Eigen::Index>(snaps.n_vars) * snaps.n_cells;
    snaps.data = read_matrix(is, n_dof, n_s, path);
    snaps.times.resize(n_s);
    read_f64_block(is, snaps.times.data(), static_cast<std::size_t>(n_s), path);
    return snaps;
}

void write_manifold(const Manifold& manifold, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open manifold file for writing: " + path);
    os.write(kManifoldMagic, 4);
    write_u32(os, kVersion);

    const int r = manifold.reduced_dim();
    if (const auto* lin = dynamic_cast<const LinearManifold*>(&manifold)) {
        write_u32(os, 0);
        write_u32(os, static_cast<std::uint32_t>(manifold.full_dim()));
        write_u32(os, static_cast<std::uint32_t>(r));
        write_matrix(os, lin->basis());
        write_f64_block(os, lin->shift().data(),
                        static_cast<std::size_t>(lin->shift().size()));
    } else if (const auto* quad = dynamic_cast<const QuadraticManifold*>(&manifold)) {
        write_u32(os, 1);
        write_u32(os, static_cast<std::uint32_t>(manifold.full_dim()));
        write_u32(os, static_cast<std::uint32_t>(r));
        write_matrix(os, quad->basis());
        write_matrix(os, quad->quad_coeffs());
        write_f64_block(os, quad->shift().data(),
                        static_cast<std::size_t>(quad->shift().size()));
    } else if (const auto* rat =
                   dynamic_cast<const RationalQuadraticManifold*>(&manifold)) {
        write_u32(os, 2);
        write_u32(os, static_cast<std::uint32_t>(manifold.full_dim()));
        write_u32(os, static_cast<std::uint32_t>(r));
        write_matrix(os, pack_sym(rat->h2(), r));
        write_matrix(os, rat->h1());
        write_f64_block(os, rat->u_ref().data(),
                        static_cast<std::size_t>(rat->u_ref().size()));
        write_matrix(os, pack_lower(rat->chol(), r));
    } else {
        throw IoError("manifold kind is not serializable (TSE is a runtime wrapper)");
    }
    if (!os) throw IoError("failed writing manifold file: " + path);
}

std::unique_ptr<Manifold> read_manifold(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open manifold file: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kManifoldMagic, 4) != 0)
        throw IoError("not a manifold file (bad magic): " + path);
    if (read_u32(is, path) != kVersion)
        throw IoError("unsupported manifold file version: " + path);
    const std::uint32_t kind = read_u32(is, path);
    const Eigen::Index n_dof = static_cast<Eigen::Index>(read_u32(is, path));
    const int r = static_cast<int>(read_u32(is, path));

    if (kind == 0) {
        Eigen::MatrixXd basis = read_matrix(is, n_dof, r, path);
        Eigen::VectorXd shift = read_matrix(is, n_dof, 1, path);
        return std::make_unique<LinearManifold>(std::move(basis), std::move(shift));
    }
    if (kind == 1) {
        Eigen::MatrixXd basis = read_matrix(is, n_dof, r, path);
        Eigen::MatrixXd quad = read_matrix(is, n_dof, packed_count(r), path);
        Eigen::VectorXd shift = read_matrix(is, n_dof, 1, path);
        return std::make_unique<QuadraticManifold>(std::move(basis), std::move(quad),
                                                   std::move(shift));
    }
    if (kind == 2) {
        auto h2 = unpack_sym(read_matrix(is, n_dof, packed_count(r), path), r);
        Eigen::MatrixXd h1 = read_matrix(is, n_dof, r, path);
        Eigen::VectorXd u_ref = read_matrix(is, n_dof, 1, path);
        auto chol = unpack_lower(read_matrix(is, n_dof, packed_count(r), path), r);
        return std::make_unique<RationalQuadraticManifold>(
            std::move(h2), std::move(h1), std::move(u_ref), std::move(chol));
    }
    throw IoError("unknown manifold kind tag in " + path);
}

void write_entropy_csv(const EntropyTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open entropy trace file: " + path);
    os << "t,S_h,rate_cons,rate_diss\n";
    for (size_t i = 0; i < trace.t.size(); ++i)
        os << fmt(trace.t[i]) << ',' << fmt(trace.total_entropy[i]) << ','
           << fmt(trace.rate_cons[i]) << ',' << fmt(trace.rate_diss[i]) << '\n';
    if (!os) throw IoError("failed writing entropy trace file: " + path);
}

void write_rom_trace_csv(const RomTrace& trace, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open ROM trace file: " + path);
    os << "t,S_r,rate_cons,rate_diss,eps_Pi,alpha\n";
    for (size_t i = 0; i < trace.t.size(); ++i) {
        os << fmt(trace.t[i]) << ',' << fmt(trace.total_entropy[i]) << ','
           << fmt(trace.rate_cons[i]) << ',' << fmt(trace.rate_diss[i]) << ',';
        if (i < trace.eps_pi.size()) os << fmt(trace.eps_pi[i]);
        os << ',';
        if (i < trace.alpha.size()) os << fmt(trace.alpha[i]);
        os << '\n';
    }
    if (!os) throw IoError("failed writing ROM trace file: " + path);
}

void write_rom_coords_csv(const RomTrace& trace, bool tse, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open ROM coordinate file: " + path);
    const Eigen::Index dim = trace.coords.rows();
    const Eigen::Index r = tse ? dim - 1 : dim;
    os << "t";
    for (Eigen::Index k = 0; k < r; ++k) os << ",a_" << k;
    if (tse) os << ",alpha";
    os << '\n';
    for (Eigen::Index j = 0; j < trace.coords.cols(); ++j) {
        os << fmt(trace.coord_times[j]);
        for (Eigen::Index k = 0; k < dim; ++k) os << ',' << fmt(trace.coords(k, j));
        os << '\n';
    }
    if (!os) throw IoError("failed writing ROM coordinate file: " + path);
}

Eigen::MatrixXd read_rom_coords_csv(const std::string& path, Eigen::VectorXd& times) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open ROM coordinate file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty ROM coordinate file: " + path);
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("ROM coordinate file has no samples: " + path);
    const Eigen::Index dim = static_cast<Eigen::Index>(rows[0].size()) - 1;
    Eigen::MatrixXd coords(dim, static_cast<Eigen::Index>(rows.size()));
    times.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t j = 0; j < rows.size(); ++j) {
        if (static_cast<Eigen::Index>(rows[j].size()) != dim + 1)
            throw IoError("ragged ROM coordinate file: " + path);
        times[static_cast<Eigen::Index>(j)] = rows[j][0];
        for (Eigen::Index k = 0; k < dim; ++k)
            coords(k, static_cast<Eigen::Index>(j)) = rows[j][static_cast<size_t>(k) + 1];
    }
    return coords;
}

void write_rom_status_json(const RomTrace& trace, double online_seconds,
                           const std::string& path) {
    nlohmann::json j;
    j["status"] = trace.status;
    if (trace.failed()) {
        j["fail_time"] = trace.fail_time;
        j["fail_reason"] = trace.fail_reason;
        j["fail_detail"] = trace.fail_detail;
    } else {
        j["fail_time"] = nullptr;
        j["fail_reason"] = nullptr;
    }
    j["t_online_seconds"] = online_seconds;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open status file: " + path);
    os << j.dump(2) << '\n';
    if (!os) throw IoError("failed writing status file: " + path);
}

void write_fit_report_csv(const std::vector<RowFitInfo>& report,
                          const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open fit report file: " + path);
    os << "row,iters,final_residual,fallback_used\n";
    for (const auto& info : report)
        os << info.row << ',' << info.iters << ',' << fmt(info.residual) << ','
           << (info.fallback ? 1 : 0) << '\n';
    if (!os) throw IoError("failed writing fit report file: " + path);
}

void write_singular_values_csv(const Eigen::VectorXd& sigma, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open singular value file: " + path);
    os << "index,sigma\n";
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        os << i << ',' << fmt(sigma[i]) << '\n';
    if (!os) throw IoError("failed writing singular value file: " + path);
}

void write_fit_meta_json(const std::string& kind, int r, double eps_xt_max,
                         double fit_seconds, const std::string& path) {
    nlohmann::json j;
    j["kind"] = kind;
    j["r"] = r;
    j["eps_xt_max"] = eps_xt_max;
    j["t_fit_seconds"] = fit_seconds;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open fit metadata file: " + path);
    os << j.dump(2) << '\n';
    if (!os) throw IoError("failed writing fit metadata file: " + path);
}

} // namespace esrom
