# Generated by tilewright from kernel "add". Do not edit.

import torch
import triton
import triton.language as tl


@triton.jit
def add_kernel(
    ptr_input,
    input_size_0,
    input_stride_0,
    ptr_other,
    other_size_0,
    other_stride_0,
    ptr_output,
    output_size_0,
    output_stride_0,
    BLOCK_SIZE: tl.constexpr,
):
    pid = tl.program_id(0)
    pid_0 = pid % tl.cdiv(input_size_0, BLOCK_SIZE)
    input_lane_0 = tl.arange(0, BLOCK_SIZE)
    input_offsets = (pid_0 * BLOCK_SIZE + input_lane_0) * input_stride_0
    input_mask = pid_0 * BLOCK_SIZE + input_lane_0 < input_size_0
    other_lane_0 = tl.arange(0, BLOCK_SIZE)
    other_offsets = (pid_0 * BLOCK_SIZE + other_lane_0) * other_stride_0
    other_mask = pid_0 * BLOCK_SIZE + other_lane_0 < other_size_0
    output_lane_0 = tl.arange(0, BLOCK_SIZE)
    output_offsets = (pid_0 * BLOCK_SIZE + output_lane_0) * output_stride_0
    output_mask = pid_0 * BLOCK_SIZE + output_lane_0 < output_size_0
    tl.store(ptr_output + output_offsets, tl.load(ptr_input + input_offsets, mask=input_mask, other=0.0) + tl.load(ptr_other + other_offsets, mask=other_mask, other=0.0), mask=output_mask)


def add_grid(input_size_0, BLOCK_SIZE):
    return (triton.cdiv(input_size_0, BLOCK_SIZE),)


def add(input, other, output, *, BLOCK_SIZE):
    assert isinstance(input, torch.Tensor) and input.dim() == 1
    input_size_0 = input.size(0)
    input_stride_0 = input.stride(0)
    assert isinstance(other, torch.Tensor) and other.dim() == 1
    other_size_0 = other.size(0)
    other_stride_0 = other.stride(0)
    assert isinstance(output, torch.Tensor) and output.dim() == 1
    output_size_0 = output.size(0)
    output_stride_0 = output.stride(0)
    assert triton.cdiv(input_size_0, BLOCK_SIZE) == triton.cdiv(other_size_0, BLOCK_SIZE), "level-0 dim 0 of 'input' and 'other'"
    assert triton.cdiv(input_size_0, BLOCK_SIZE) == triton.cdiv(output_size_0, BLOCK_SIZE), "level-0 dim 0 of 'input' and 'output'"
    grid = add_grid(input_size_0, BLOCK_SIZE)
    add_kernel[grid](
        input,
        input_size_0,
        input_stride_0,
        other,
        other_size_0,
        other_stride_0,
        output,
        output_size_0,
        output_stride_0,
        BLOCK_SIZE,
    )
    return output
