#include <walkscope/image_codec.hpp>

#include <walkscope/error.hpp>

#include <png.h>

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

namespace walkscope {

namespace {

bool has_png_magic(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::array<unsigned char, 8> sig{};
    in.read(reinterpret_cast<char*>(sig.data()), sig.size());
    return in.gcount() == 8 && png_sig_cmp(sig.data(), 0, 8) == 0;
}

// Next whitespace-delimited PNM header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

int pnm_int(std::istream& in, const std::filesystem::path& path) {
    const std::string tok = pnm_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) {
            throw FormatError("bad PGM header in " + path.string());
        }
        return v;
    } catch (const std::logic_error&) {
        throw FormatError("bad PGM header in " + path.string());
    }
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    if (pnm_token(in) != "P5") {
        throw FormatError(path.string() + " is neither PNG nor binary PGM (P5)");
    }
    const int width = pnm_int(in, path);
    const int height = pnm_int(in, path);
    const int maxval = pnm_int(in, path);
    if (width <= 0 || height <= 0) {
        throw FormatError("non-positive PGM dimensions in " + path.string());
    }
    if (maxval <= 0 || maxval > 255) {
        throw FormatError("only 8-bit PGM is supported: " + path.string());
    }
    GrayImage img(width, height);
    in.read(reinterpret_cast<char*>(img.values().data()), static_cast<std::streamsize>(img.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.size()) {
        throw FormatError("truncated PGM pixel data in " + path.string());
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.values().data()),
              static_cast<std::streamsize>(image.size()));
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

// RAII wrapper over the libpng simplified API.
struct PngImage {
    png_image image;
    PngImage() {
        std::memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

template <typename Pixel>
Grid<Pixel> read_png(const std::filesystem::path& path, png_uint_32 format, bool require_gray) {
    PngImage png;
    const std::string name = path.string();
    if (png_image_begin_read_from_file(&png.image, name.c_str()) == 0) {
        throw FormatError("cannot decode PNG " + name + ": " + png.image.message);
    }
    if (require_gray &&
        (png.image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA | PNG_FORMAT_FLAG_LINEAR)) != 0) {
        throw FormatError(name + " is not an 8-bit single-channel image");
    }
    png.image.format = format;
    Grid<Pixel> out(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
    if (png_image_finish_read(&png.image, nullptr, out.values().data(), 0, nullptr) == 0) {
        throw FormatError("cannot decode PNG " + name + ": " + png.image.message);
    }
    return out;
}

template <typename Pixel>
void write_png(const std::filesystem::path& path, const Grid<Pixel>& image, png_uint_32 format) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(image.width());
    png.image.height = static_cast<png_uint_32>(image.height());
    png.image.format = format;
    const std::string name = path.string();
    if (png_image_write_to_file(&png.image, name.c_str(), 0, image.values().data(), 0, nullptr) == 0) {
        throw IoError("cannot write PNG " + name + ": " + png.image.message);
    }
}

} // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
    if (has_png_magic(path)) {
        return read_png<std::uint8_t>(path, PNG_FORMAT_GRAY, true);
    }
    return read_pgm(path);
}

void write_gray_image(const std::filesystem::path& path, const GrayImage& image) {
    if (image.width() <= 0 || image.height() <= 0) {
        throw PreconditionError("cannot write an empty image to " + path.string());
    }
    if (path.extension() == ".pgm") {
        write_pgm(path, image);
    } else {
        write_png(path, image, PNG_FORMAT_GRAY);
    }
}

static_assert(sizeof(Rgb) == 3);

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
    if (image.width() <= 0 || image.height() <= 0) {
        throw PreconditionError("cannot write an empty image to " + path.string());
    }
    write_png(path, image, PNG_FORMAT_RGB);
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
    if (!has_png_magic(path)) {
        throw FormatError(path.string() + " is not a PNG file");
    }
    return read_png<Rgb>(path, PNG_FORMAT_RGB, false);
}

} // namespace walkscope
