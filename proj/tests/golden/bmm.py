# Generated by tilewright from kernel "bmm". Do not edit.

import torch
import triton
import triton.language as tl


@triton.jit
def bmm_kernel(
    ptr_input,
    input_size_0,
    input_size_1,
    input_size_2,
    input_stride_0,
    input_stride_1,
    input_stride_2,
    ptr_other,
    other_size_0,
    other_size_1,
    other_size_2,
    other_stride_0,
    other_stride_1,
    other_stride_2,
    ptr_output,
    output_size_0,
    output_size_1,
    output_size_2,
    output_stride_0,
    output_stride_1,
    output_stride_2,
    BLOCK_SIZE_M: tl.constexpr,
    BLOCK_SIZE_N: tl.constexpr,
    BLOCK_SIZE_K: tl.constexpr,
):
    pid = tl.program_id(0)
    pid_0 = pid // (tl.cdiv(input_size_1, BLOCK_SIZE_M) * tl.cdiv(output_size_2, BLOCK_SIZE_N)) % input_size_0
    pid_1 = pid // tl.cdiv(output_size_2, BLOCK_SIZE_N) % tl.cdiv(input_size_1, BLOCK_SIZE_M)
    pid_2 = pid % tl.cdiv(output_size_2, BLOCK_SIZE_N)
    input_lane_0 = tl.arange(0, BLOCK_SIZE_M)[:, None]
    input_lane_1 = tl.arange(0, BLOCK_SIZE_K)[None, :]
    other_lane_0 = tl.arange(0, BLOCK_SIZE_K)[:, None]
    other_lane_1 = tl.arange(0, BLOCK_SIZE_N)[None, :]
    output_lane_0 = tl.arange(0, BLOCK_SIZE_M)[:, None]
    output_lane_1 = tl.arange(0, BLOCK_SIZE_N)[None, :]
    output_offsets = pid_0 * output_stride_0 + (pid_1 * BLOCK_SIZE_M + output_lane_0) * output_stride_1 + (pid_2 * BLOCK_SIZE_N + output_lane_1) * output_stride_2
    output_mask = (pid_0 < output_size_0) & (pid_1 * BLOCK_SIZE_M + output_lane_0 < output_size_1) & (pid_2 * BLOCK_SIZE_N + output_lane_1 < output_size_2)
    accumulator = tl.zeros((BLOCK_SIZE_M, BLOCK_SIZE_N), dtype=tl.float32)
    for k in range(tl.cdiv(input_size_2, BLOCK_SIZE_K)):
        input_offsets = pid_0 * input_stride_0 + (pid_1 * BLOCK_SIZE_M + input_lane_0) * input_stride_1 + (k * BLOCK_SIZE_K + input_lane_1) * input_stride_2
        input_mask = (pid_0 < input_size_0) & (pid_1 * BLOCK_SIZE_M + input_lane_0 < input_size_1) & (k * BLOCK_SIZE_K + input_lane_1 < input_size_2)
        other_offsets = pid_0 * other_stride_0 + (k * BLOCK_SIZE_K + other_lane_0) * other_stride_1 + (pid_2 * BLOCK_SIZE_N + other_lane_1) * other_stride_2
        other_mask = (pid_0 < other_size_0) & (k * BLOCK_SIZE_K + other_lane_0 < other_size_1) & (pid_2 * BLOCK_SIZE_N + other_lane_1 < other_size_2)
        accumulator += tl.dot(tl.load(ptr_input + input_offsets, mask=input_mask, other=0.0), tl.load(ptr_other + other_offsets, mask=other_mask, other=0.0), allow_tf32=False)
    tl.store(ptr_output + output_offsets, accumulator, mask=output_mask)


def bmm_grid(input_size_0, input_size_1, output_size_2, BLOCK_SIZE_M, BLOCK_SIZE_N):
    return (input_size_0 * triton.cdiv(input_size_1, BLOCK_SIZE_M) * triton.cdiv(output_size_2, BLOCK_SIZE_N),)


def bmm(input, other, output, *, BLOCK_SIZE_M, BLOCK_SIZE_N, BLOCK_SIZE_K):
    assert isinstance(input, torch.Tensor) and input.dim() == 3
    input_size_0 = input.size(0)
    input_size_1 = input.size(1)
    input_size_2 = input.size(2)
    input_stride_0 = input.stride(0)
    input_stride_1 = input.stride(1)
    input_stride_2 = input.stride(2)
    assert isinstance(other, torch.Tensor) and other.dim() == 3
    other_size_0 = other.size(0)
    other_size_1 = other.size(1)
    other_size_2 = other.size(2)
    other_stride_0 = other.stride(0)
    other_stride_1 = other.stride(1)
    other_stride_2 = other.stride(2)
    assert isinstance(output, torch.Tensor) and output.dim() == 3
    output_size_0 = output.size(0)
    output_size_1 = output.size(1)
    output_size_2 = output.size(2)
    output_stride_0 = output.stride(0)
    output_stride_1 = output.stride(1)
    output_stride_2 = output.stride(2)
    assert input_size_0 == other_size_0, "level-0 dim 0 of 'input' and 'other'"
    assert triton.cdiv(input_size_1, BLOCK_SIZE_M) == triton.cdiv(output_size_1, BLOCK_SIZE_M), "level-0 dim 1 of 'input' and 'other'"
    assert triton.cdiv(output_size_2, BLOCK_SIZE_N) == triton.cdiv(other_size_2, BLOCK_SIZE_N), "level-0 dim 2 of 'input' and 'other'"
    assert input_size_0 == output_size_0, "level-0 dim 0 of 'input' and 'output'"
    assert triton.cdiv(input_size_1, BLOCK_SIZE_M) == triton.cdiv(output_size_1, BLOCK_SIZE_M), "level-0 dim 1 of 'input' and 'output'"
    assert input_size_0 == other_size_0, "batch"
    assert input_size_0 == output_size_0, "output batch"
    assert input_size_2 == other_size_1, "inner dimensions"
    assert input_size_1 == output_size_1, "output rows"
    assert other_size_2 == output_size_2, "output columns"
    grid = bmm_grid(input_size_0, input_size_1, output_size_2, BLOCK_SIZE_M, BLOCK_SIZE_N)
    bmm_kernel[grid](
        input,
        input_size_0,
        input_size_1,
        input_size_2,
        input_stride_0,
        input_stride_1,
        input_stride_2,
        other,
        other_size_0,
        other_size_1,
        other_size_2,
        other_stride_0,
        other_stride_1,
        other_stride_2,
        output,
        output_size_0,
        output_size_1,
        output_size_2,
        output_stride_0,
        output_stride_1,
        output_stride_2,
        BLOCK_SIZE_M,
        BLOCK_SIZE_N,
        BLOCK_SIZE_K,
    )
    return output
