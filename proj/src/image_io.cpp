/**
 * Copyright 2026 The yoloprep Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "yoloprep/image_io.hpp"

#include <cstdio>
#include <csetjmp>
#include <cstdlib>
#include <string>
#include <fstream>
#include <iterator>

#include <jpeglib.h>

namespace yoloprep {

namespace {

struct JpegErrorManager
{
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void on_jpeg_error(j_common_ptr cinfo)
{
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

void silence_jpeg_output(j_common_ptr) {}

bool is_sof_marker(int m)
{
    return m >= 0xC0 && m <= 0xCF && m != 0xC4 && m != 0xC8 && m != 0xCC;
}

} // namespace

bool has_jpeg_magic(std::span<const std::uint8_t> head) noexcept
{
    return head.size() >= 3 && head[0] == 0xFF && head[1] == 0xD8 && head[2] == 0xFF;
}

bool has_jpeg_magic(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::uint8_t head[3] = {};
    in.read(reinterpret_cast<char*>(head), 3);
    return in.gcount() == 3 && has_jpeg_magic(std::span<const std::uint8_t>(head, 3));
}

std::optional<Size> read_jpeg_size(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        return std::nullopt;
    }

    auto get = [&in]() -> int {
        const int c = in.get();
        return in ? c : -1;
    };

    if (get() != 0xFF || get() != 0xD8)
    {
        return std::nullopt;
    }

    while (in)
    {
        int c = get();
        if (c != 0xFF)
        {
            return std::nullopt;
        }
        while (c == 0xFF)
        {
            c = get();
        }
        if (c < 0)
        {
            return std::nullopt;
        }
        const int marker = c;
        if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD8))
        {
            continue;
        }
        if (marker == 0xD9 || marker == 0xDA)
        {
            return std::nullopt;
        }

        const int hi = get();
        const int lo = get();
        if (hi < 0 || lo < 0)
        {
            return std::nullopt;
        }
        const int length = (hi << 8) | lo;
        if (length < 2)
        {
            return std::nullopt;
        }

        if (is_sof_marker(marker))
        {
            std::uint8_t sof[5] = {};
            in.read(reinterpret_cast<char*>(sof), 5);
            if (in.gcount() != 5)
            {
                return std::nullopt;
            }
            const int height = (sof[1] << 8) | sof[2];
            const int width = (sof[3] << 8) | sof[4];
            if (width < 1 || height < 1)
            {
                return std::nullopt;
            }
            return Size{width, height};
        }
        in.seekg(length - 2, std::ios::cur);
    }
    return std::nullopt;
}

Raster decode_jpeg(std::span<const std::uint8_t> data)
{
    if (!has_jpeg_magic(data))
    {
        throw ImageIoError("not a JPEG stream");
    }

    jpeg_decompress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = on_jpeg_error;
    err.base.output_message = silence_jpeg_output;

    Raster out;
    if (setjmp(err.jump))
    {
        jpeg_destroy_decompress(&cinfo);
        throw ImageIoError(std::string("JPEG decode failed: ") + err.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data.data(), static_cast<unsigned long>(data.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    out.width = static_cast<int>(cinfo.output_width);
    out.height = static_cast<int>(cinfo.output_height);
    out.pixels.resize(static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height) * 3);
    while (cinfo.output_scanline < cinfo.output_height)
    {
        JSAMPROW row = out.pixels.data() + out.index(0, static_cast<int>(cinfo.output_scanline));
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

std::vector<std::uint8_t> encode_jpeg(const Raster& image, int quality)
{
    if (!image.valid())
    {
        throw ImageIoError("cannot encode an invalid raster");
    }

    jpeg_compress_struct cinfo{};
    JpegErrorManager err{};
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = on_jpeg_error;
    err.base.output_message = silence_jpeg_output;

    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    if (setjmp(err.jump))
    {
        jpeg_destroy_compress(&cinfo);
        std::free(buffer);
        throw ImageIoError(std::string("JPEG encode failed: ") + err.message);
    }

    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(image.width);
    cinfo.image_height = static_cast<JDIMENSION>(image.height);
    cinfo.input_components = 3;
    cinfo.in_color_space = JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height)
    {
        auto* row = const_cast<JSAMPLE*>(image.at(0, static_cast<int>(cinfo.next_scanline)));
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);

    std::vector<std::uint8_t> out(buffer, buffer + size);
    std::free(buffer);
    return out;
}

Raster read_jpeg(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    try
    {
        return decode_jpeg(bytes);
    }
    catch (const ImageIoError& e)
    {
        throw ImageIoError(path.string() + ": " + e.what());
    }
}

void write_jpeg(const std::filesystem::path& path, const Raster& image, int quality)
{
    write_file_bytes(path, encode_jpeg(image, quality));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ImageIoError("cannot open " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out)
    {
        throw ImageIoError("write failed: " + path.string());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
    {
        throw ImageIoError("write failed: " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw ImageIoError("cannot open " + path.string());
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace yoloprep
