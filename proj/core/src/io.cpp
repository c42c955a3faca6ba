#include "sgbh/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace sgbh {

namespace {

std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

void write_u64(std::FILE* f, std::uint64_t v) {
    if (std::fwrite(&v, sizeof(v), 1, f) != 1) throw std::runtime_error("short write");
}

std::uint64_t read_u64(std::FILE* f) {
    std::uint64_t v = 0;
    if (std::fread(&v, sizeof(v), 1, f) != 1) throw std::runtime_error("short read");
    return v;
}

void write_doubles(std::FILE* f, const std::vector<double>& v) {
    if (std::fwrite(v.data(), sizeof(double), v.size(), f) != v.size())
        throw std::runtime_error("short write");
}

void read_doubles(std::FILE* f, std::vector<double>& v) {
    if (std::fread(v.data(), sizeof(double), v.size(), f) != v.size())
        throw std::runtime_error("short read");
}

}  // namespace

void write_sheet_binary(const NoiseSheet& sheet, const std::string& path) {
    std::FILE* f = open_or_throw(path, "wb");
    write_u64(f, static_cast<std::uint64_t>(sheet.tg.n_steps));
    write_u64(f, static_cast<std::uint64_t>(sheet.sg.m));
    write_doubles(f, sheet.dW);
    std::fclose(f);
}

NoiseSheet read_sheet_binary(const std::string& path, double T) {
    std::FILE* f = open_or_throw(path, "rb");
    const auto n = static_cast<int>(read_u64(f));
    const auto m = static_cast<int>(read_u64(f));
    NoiseSheet sheet;
    sheet.tg = TimeGrid(n, T);
    sheet.sg = SpatialGrid(m);
    sheet.dW.resize(static_cast<std::size_t>(n) * m);
    read_doubles(f, sheet.dW);
    std::fclose(f);
    sheet.sampler = "file:" + path;
    return sheet;
}

void write_field_binary(const FieldPath& field, const std::string& path, std::uint64_t tag) {
    std::FILE* f = open_or_throw(path, "wb");
    write_u64(f, static_cast<std::uint64_t>(field.tg.n_steps));
    write_u64(f, static_cast<std::uint64_t>(field.sg.m));
    write_u64(f, tag);
    write_doubles(f, field.values);
    std::fclose(f);
}

FieldPath read_field_binary(const std::string& path, double T) {
    std::FILE* f = open_or_throw(path, "rb");
    const auto n = static_cast<int>(read_u64(f));
    const auto m = static_cast<int>(read_u64(f));
    read_u64(f);  // tag
    FieldPath field(TimeGrid(n, T), SpatialGrid(m));
    read_doubles(f, field.values);
    std::fclose(f);
    field.u0 = field.slice_vec(0);
    return field;
}

void write_field_csv(const FieldPath& field, const std::string& path) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "t,x,u\n");
    for (int i = 0; i <= field.tg.n_steps; ++i)
        for (int j = 0; j < field.sg.m; ++j)
            std::fprintf(f, "%.17g,%.17g,%.17g\n", field.tg.node(i), field.sg.node(j),
                         field.at(i, j));
    std::fclose(f);
}

void write_derivative_csv(const DerivativeField& field, const std::string& path) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "t,x,D\n");
    for (int i = 0; i <= field.tg.n_steps; ++i)
        for (int j = 0; j < field.sg.m; ++j)
            std::fprintf(f, "%.17g,%.17g,%.17g\n", field.tg.node(i), field.sg.node(j),
                         field.at(i, j));
    std::fclose(f);
}

void write_text(const std::string& path, const std::string& content) {
    std::FILE* f = open_or_throw(path, "w");
    if (!content.empty() && std::fwrite(content.data(), 1, content.size(), f) != content.size()) {
        std::fclose(f);
        throw std::runtime_error("short write to " + path);
    }
    std::fclose(f);
}

}  // namespace sgbh
