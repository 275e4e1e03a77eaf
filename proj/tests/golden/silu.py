# Generated by tilewright from kernel "silu". Do not edit.

import torch
import triton
import triton.language as tl


@triton.jit
def silu_kernel(
    ptr_input,
    input_size_0,
    input_stride_0,
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
    output_lane_0 = tl.arange(0, BLOCK_SIZE)
    output_offsets = (pid_0 * BLOCK_SIZE + output_lane_0) * output_stride_0
    output_mask = pid_0 * BLOCK_SIZE + output_lane_0 < output_size_0
    x = tl.load(ptr_input + input_offsets, mask=input_mask, other=0.0)
    tl.store(ptr_output + output_offsets, x * tl.sigmoid(x), mask=output_mask)


def silu_grid(input_size_0, BLOCK_SIZE):
    return (triton.cdiv(input_size_0, BLOCK_SIZE),)


def silu(input, output, *, BLOCK_SIZE):
    assert isinstance(input, torch.Tensor) and input.dim() == 1
    input_size_0 = input.size(0)
    input_stride_0 = input.stride(0)
    assert isinstance(output, torch.Tensor) and output.dim() == 1
    output_size_0 = output.size(0)
    output_stride_0 = output.stride(0)
    assert triton.cdiv(input_size_0, BLOCK_SIZE) == triton.cdiv(output_size_0, BLOCK_SIZE), "level-0 dim 0 of 'input' and 'output'"
    grid = silu_grid(input_size_0, BLOCK_SIZE)
    silu_kernel[grid](
        input,
        input_size_0,
        input_stride_0,
        output,
        output_size_0,
        output_stride_0,
        BLOCK_SIZE,
    )
    return output
